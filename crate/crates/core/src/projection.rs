//! Pressure Poisson solve and discrete Helmholtz projection.
//!
//! The operator is `L = div_odd . grad_even`, built from the same wide
//! derivatives the solver uses, so `div(v - grad phi) = div v - L phi` holds
//! to round-off once `L phi = div v` is solved.

use crate::error::{Error, Result};
use crate::grid::{div, grad, max_abs, Boundary, Grid, Parity, ScalarField, VectorField};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoissonMethod {
    /// Spectral on periodic grids, conjugate gradients otherwise.
    Auto,
    Spectral,
    ConjugateGradient,
}

/// Forward and inverse plans.
type FftPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

pub struct Projector {
    grid: Grid,
    method: PoissonMethod,
    fft: Option<FftPair>,
    symbol: Vec<f64>,
    buf: Vec<Complex64>,
    tmp: Vec<Complex64>,
    pub last_iterations: usize,
}

impl std::fmt::Debug for Projector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Projector")
            .field("grid", &self.grid)
            .field("method", &self.method)
            .finish()
    }
}

impl Clone for Projector {
    fn clone(&self) -> Self {
        Projector::new(self.grid, self.method).expect("projector was valid")
    }
}

impl Projector {
    pub fn new(grid: Grid, method: PoissonMethod) -> Result<Self> {
        let method = match (method, grid.bc) {
            (PoissonMethod::Auto, Boundary::Periodic) => PoissonMethod::Spectral,
            (PoissonMethod::Auto, Boundary::Walls) => PoissonMethod::ConjugateGradient,
            (PoissonMethod::Spectral, Boundary::Walls) => {
                return Err(Error::InvalidParameter {
                    key: "solver.poisson".into(),
                    reason: "spectral solve requires periodic boundaries".into(),
                })
            }
            (m, _) => m,
        };
        let n = grid.n;
        let mut p = Projector {
            grid,
            method,
            fft: None,
            symbol: Vec::new(),
            buf: Vec::new(),
            tmp: Vec::new(),
            last_iterations: 0,
        };
        if method == PoissonMethod::Spectral {
            let mut planner = FftPlanner::new();
            p.fft = Some((planner.plan_fft_forward(n), planner.plan_fft_inverse(n)));
            let h2 = grid.h * grid.h;
            let s: Vec<f64> = (0..n)
                .map(|q| {
                    (2.0 * std::f64::consts::PI * q as f64 / n as f64)
                        .sin()
                        .powi(2)
                })
                .collect();
            p.symbol = (0..n * n).map(|k| -(s[k % n] + s[k / n]) / h2).collect();
            p.buf = vec![Complex64::default(); n * n];
            p.tmp = vec![Complex64::default(); n * n];
        }
        Ok(p)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn method(&self) -> PoissonMethod {
        self.method
    }

    /// Applies `L = div_odd . grad_even`.
    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let gx = g.dx(phi, Parity::Even);
        let gy = g.dy(phi, Parity::Even);
        let mut out = g.dx(&gx, Parity::Odd);
        let yy = g.dy(&gy, Parity::Odd);
        for (a, b) in out.iter_mut().zip(&yy) {
            *a += b;
        }
        out
    }

    /// Solves `L phi = rhs` for the zero-mean solution; `tol` bounds the
    /// max-norm residual.
    pub fn solve(&mut self, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
        self.grid.check_len(rhs.len())?;
        match self.method {
            PoissonMethod::Spectral => Ok(self.solve_spectral(rhs)),
            _ => self.solve_cg(rhs, tol),
        }
    }

    fn solve_spectral(&mut self, rhs: &[f64]) -> Vec<f64> {
        let n = self.grid.n;
        let (fwd, inv) = self.fft.clone().expect("spectral plan");
        for (b, r) in self.buf.iter_mut().zip(rhs) {
            *b = Complex64::new(*r, 0.0);
        }
        fft2(&mut self.buf, &mut self.tmp, n, fwd.as_ref());
        let cut = 1e-9 * self.symbol.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (b, s) in self.buf.iter_mut().zip(&self.symbol) {
            // Null modes of the wide operator: the mean and the three
            // checkerboard modes, none of which the divergence can excite.
            if s.abs() < cut {
                *b = Complex64::default();
            } else {
                *b /= *s;
            }
        }
        fft2(&mut self.buf, &mut self.tmp, n, inv.as_ref());
        let scale = 1.0 / (n * n) as f64;
        self.last_iterations = 0;
        self.buf.iter().map(|c| c.re * scale).collect()
    }

    fn solve_cg(&mut self, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
        let g = self.grid;
        let len = g.len();
        let nulls = null_modes(g);
        // Solve A x = b with A = -L (positive semidefinite); Jacobi scaling
        // is the constant 1/h^2 for this operator.
        let inv_diag = g.h * g.h;
        let mut b: Vec<f64> = rhs.iter().map(|x| -x).collect();
        remove_modes(&mut b, &nulls);
        let mut x = vec![0.0; len];
        let mut r = b.clone();
        let budget = 10 * len;
        let mut z: Vec<f64> = r.iter().map(|v| v * inv_diag).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut it = 0;
        while max_abs(&r) > tol {
            if it >= budget {
                self.last_iterations = it;
                let bn = max_abs(&b).max(f64::MIN_POSITIVE);
                return Err(Error::PoissonNoConvergence {
                    iterations: it,
                    residual: max_abs(&r) / bn,
                });
            }
            let ap: Vec<f64> = self.apply(&p).into_iter().map(|v| -v).collect();
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                // Breakdown: the Krylov space is exhausted at round-off level.
                if max_abs(&r) > tol {
                    self.last_iterations = it;
                    let bn = max_abs(&b).max(f64::MIN_POSITIVE);
                    return Err(Error::PoissonNoConvergence {
                        iterations: it,
                        residual: max_abs(&r) / bn,
                    });
                }
                break;
            }
            let alpha = rz / pap;
            for k in 0..len {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            // Periodically recompute the true residual to avoid drift.
            if it % 50 == 49 {
                let ax = self.apply(&x);
                for k in 0..len {
                    r[k] = b[k] + ax[k];
                }
                remove_modes(&mut r, &nulls);
            }
            for k in 0..len {
                z[k] = r[k] * inv_diag;
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..len {
                p[k] = z[k] + beta * p[k];
            }
            it += 1;
        }
        self.last_iterations = it;
        remove_modes(&mut x, &nulls);
        Ok(x)
    }

    /// Returns `(v - grad phi, phi)` with `L phi = div v` and zero-mean `phi`.
    pub fn project(&mut self, v: &VectorField, tol: f64) -> Result<(VectorField, ScalarField)> {
        let d = div(v);
        let phi = self.solve(&d.data, tol)?;
        let phi = ScalarField {
            grid: self.grid,
            data: phi,
        };
        let gp = grad(&phi);
        let mut out = v.clone();
        for a in 0..2 {
            for (o, q) in out.c[a].iter_mut().zip(&gp.c[a]) {
                *o -= q;
            }
        }
        Ok((out, phi))
    }
}

/// Orthonormal basis of the null space of `L` (constants, plus the three
/// checkerboard modes on periodic grids).
fn null_modes(g: Grid) -> Vec<Vec<f64>> {
    let n = g.n;
    let norm = 1.0 / (n as f64);
    let mut modes = vec![vec![norm; n * n]];
    if g.bc == Boundary::Periodic {
        for (px, py) in [(1, 0), (0, 1), (1, 1)] {
            let m = (0..n * n)
                .map(|k| {
                    let (i, j) = (k % n, k / n);
                    let s = if (px * i + py * j) % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    s * norm
                })
                .collect();
            modes.push(m);
        }
    }
    modes
}

fn remove_modes(x: &mut [f64], modes: &[Vec<f64>]) {
    for m in modes {
        let c = dot(x, m);
        for (a, b) in x.iter_mut().zip(m) {
            *a -= c * b;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn fft2(buf: &mut [Complex64], tmp: &mut [Complex64], n: usize, fft: &dyn Fft<f64>) {
    fft.process(buf);
    transpose(buf, tmp, n);
    fft.process(tmp);
    transpose(tmp, buf, n);
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for j in 0..n {
        for i in 0..n {
            dst[i * n + j] = src[j * n + i];
        }
    }
}

/// One-shot projection with the default solver for the grid's boundary mode.
pub fn project_div_free(v: &VectorField, tol: f64) -> Result<(VectorField, ScalarField)> {
    Projector::new(v.grid, PoissonMethod::Auto)?.project(v, tol)
}
