//! Uniform cell-centered mesh on the unit square and its difference operators.
//!
//! Cell `(i, j)` has center `((i + 1/2) h, (j + 1/2) h)` and row-major index
//! `j * n + i`. First derivatives use the wide centered stencil
//! `(u[i+1] - u[i-1]) / 2h`; the Laplacian and the conductive flux use the
//! compact five-point stencil.
//!
//! In walls mode each operator takes a ghost [`Parity`]: `Even` mirrors the
//! first interior value (homogeneous Neumann), `Odd` mirrors it with a sign
//! flip (homogeneous Dirichlet at the wall face). With these conventions the
//! wide derivative satisfies `D_even^T = -D_odd`, which is the discrete
//! integration by parts the energy bookkeeping relies on.

use crate::error::{Error, Result};
use crate::tensor2::Mat2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Walls,
}

impl std::str::FromStr for Boundary {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" => Ok(Boundary::Periodic),
            "walls" => Ok(Boundary::Walls),
            _ => Err(format!(
                "unknown boundary mode `{s}` (expected periodic or walls)"
            )),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Walls => "walls",
        })
    }
}

/// Ghost-cell reflection rule used in walls mode; ignored when periodic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn product(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub bc: Boundary,
}

impl Grid {
    pub fn new(n: usize, bc: Boundary) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidGrid(format!("n must be at least 8, got {n}")));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n must be even, got {n}")));
        }
        Ok(Grid {
            n,
            h: 1.0 / n as f64,
            bc,
        })
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// Cell-center coordinate along either axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    pub fn check_len(&self, got: usize) -> Result<()> {
        if got == self.len() {
            Ok(())
        } else {
            Err(Error::FieldSize {
                expected: self.len(),
                got,
            })
        }
    }

    /// Wide centered derivative along x.
    pub fn dx(&self, u: &[f64], parity: Parity) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.dx_into(u, parity, &mut out);
        out
    }

    pub fn dx_into(&self, u: &[f64], parity: Parity, out: &mut [f64]) {
        let n = self.n;
        let c = 0.5 / self.h;
        let s = parity.sign();
        for j in 0..n {
            let row = &u[j * n..(j + 1) * n];
            let o = &mut out[j * n..(j + 1) * n];
            for i in 1..n - 1 {
                o[i] = c * (row[i + 1] - row[i - 1]);
            }
            match self.bc {
                Boundary::Periodic => {
                    o[0] = c * (row[1] - row[n - 1]);
                    o[n - 1] = c * (row[0] - row[n - 2]);
                }
                Boundary::Walls => {
                    o[0] = c * (row[1] - s * row[0]);
                    o[n - 1] = c * (s * row[n - 1] - row[n - 2]);
                }
            }
        }
    }

    /// Wide centered derivative along y.
    pub fn dy(&self, u: &[f64], parity: Parity) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.dy_into(u, parity, &mut out);
        out
    }

    pub fn dy_into(&self, u: &[f64], parity: Parity, out: &mut [f64]) {
        let n = self.n;
        let c = 0.5 / self.h;
        let s = parity.sign();
        for j in 0..n {
            let (up, dn, up_s, dn_s) = match (j, self.bc) {
                (0, Boundary::Periodic) => (1, n - 1, 1.0, 1.0),
                (0, Boundary::Walls) => (1, 0, 1.0, s),
                (jj, Boundary::Periodic) if jj == n - 1 => (0, n - 2, 1.0, 1.0),
                (jj, Boundary::Walls) if jj == n - 1 => (n - 1, n - 2, s, 1.0),
                (jj, _) => (jj + 1, jj - 1, 1.0, 1.0),
            };
            for i in 0..n {
                out[j * n + i] = c * (up_s * u[up * n + i] - dn_s * u[dn * n + i]);
            }
        }
    }

    /// Compact five-point Laplacian.
    pub fn laplacian(&self, u: &[f64], parity: Parity) -> Vec<f64> {
        let n = self.n;
        let c = 1.0 / (self.h * self.h);
        let s = parity.sign();
        let periodic = self.bc == Boundary::Periodic;
        let mut out = vec![0.0; self.len()];
        for j in 0..n {
            let row = &u[j * n..(j + 1) * n];
            let o = &mut out[j * n..(j + 1) * n];
            for i in 1..n - 1 {
                o[i] = row[i + 1] + row[i - 1] - 2.0 * row[i];
            }
            let (lo, hi) = if periodic {
                (row[n - 1], row[0])
            } else {
                (s * row[0], s * row[n - 1])
            };
            o[0] = row[1] + lo - 2.0 * row[0];
            o[n - 1] = hi + row[n - 2] - 2.0 * row[n - 1];
        }
        for j in 0..n {
            let (jm, jp) = (j.wrapping_sub(1), j + 1);
            for i in 0..n {
                let uc = u[j * n + i];
                let below = if j > 0 {
                    u[jm * n + i]
                } else if periodic {
                    u[(n - 1) * n + i]
                } else {
                    s * uc
                };
                let above = if jp < n {
                    u[jp * n + i]
                } else if periodic {
                    u[i]
                } else {
                    s * uc
                };
                let k = j * n + i;
                out[k] = c * (out[k] + below + above - 2.0 * uc);
            }
        }
        out
    }

    /// Flux-form `div(k grad u)` with face-averaged coefficient `k` and
    /// zero boundary flux in walls mode.
    pub fn div_flux(&self, u: &[f64], k: &[f64]) -> Vec<f64> {
        let n = self.n;
        let c = 1.0 / (self.h * self.h);
        let mut out = vec![0.0; self.len()];
        let periodic = self.bc == Boundary::Periodic;
        // x faces
        for j in 0..n {
            let faces = if periodic { n } else { n - 1 };
            for i in 0..faces {
                let a = j * n + i;
                let b = j * n + (i + 1) % n;
                let flux = c * 0.5 * (k[a] + k[b]) * (u[b] - u[a]);
                out[a] += flux;
                out[b] -= flux;
            }
        }
        // y faces
        let faces = if periodic { n } else { n - 1 };
        for j in 0..faces {
            let jn = (j + 1) % n;
            for i in 0..n {
                let a = j * n + i;
                let b = jn * n + i;
                let flux = c * 0.5 * (k[a] + k[b]) * (u[b] - u[a]);
                out[a] += flux;
                out[b] -= flux;
            }
        }
        out
    }

    /// Squared face gradients averaged back to cells: the pointwise density
    /// whose integral equals `-integrate(u * div_flux(u, k))` when weighted by `k`.
    pub fn face_grad_sq(&self, u: &[f64], k: &[f64]) -> Vec<f64> {
        let n = self.n;
        let c = 1.0 / (self.h * self.h);
        let mut out = vec![0.0; self.len()];
        let periodic = self.bc == Boundary::Periodic;
        let faces = if periodic { n } else { n - 1 };
        for j in 0..n {
            for i in 0..faces {
                let a = j * n + i;
                let b = j * n + (i + 1) % n;
                let w = c * 0.5 * (k[a] + k[b]) * (u[b] - u[a]).powi(2);
                out[a] += 0.5 * w;
                out[b] += 0.5 * w;
            }
        }
        for j in 0..faces {
            let jn = (j + 1) % n;
            for i in 0..n {
                let a = j * n + i;
                let b = jn * n + i;
                let w = c * 0.5 * (k[a] + k[b]) * (u[b] - u[a]).powi(2);
                out[a] += 0.5 * w;
                out[b] += 0.5 * w;
            }
        }
        out
    }

    /// Discrete integral `h^2 * sum`.
    #[inline]
    pub fn integrate(&self, u: &[f64]) -> f64 {
        self.cell_area() * u.iter().sum::<f64>()
    }

    pub fn scalar(&self, data: Vec<f64>) -> Result<ScalarField> {
        self.check_len(data.len())?;
        Ok(ScalarField { grid: *self, data })
    }

    pub fn scalar_fn(&self, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let mut data = Vec::with_capacity(self.len());
        for j in 0..self.n {
            for i in 0..self.n {
                data.push(f(self.coord(i), self.coord(j)));
            }
        }
        ScalarField { grid: *self, data }
    }

    pub fn vector_fn(&self, f: impl Fn(f64, f64) -> [f64; 2]) -> VectorField {
        let mut v = VectorField::zeros(*self);
        for j in 0..self.n {
            for i in 0..self.n {
                let k = self.idx(i, j);
                let [a, b] = f(self.coord(i), self.coord(j));
                v.c[0][k] = a;
                v.c[1][k] = b;
            }
        }
        v
    }

    pub fn tensor_fn(&self, f: impl Fn(f64, f64) -> Mat2) -> TensorField {
        let mut t = TensorField::zeros(*self);
        for j in 0..self.n {
            for i in 0..self.n {
                t.set(self.idx(i, j), f(self.coord(i), self.coord(j)));
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub c: [Vec<f64>; 2],
}

/// Full 2x2 tensor field stored as components `[a11, a12, a21, a22]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    pub grid: Grid,
    pub c: [Vec<f64>; 4],
}

impl ScalarField {
    pub fn constant(grid: Grid, value: f64) -> Self {
        ScalarField {
            grid,
            data: vec![value; grid.len()],
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn integrate(&self) -> f64 {
        self.grid.integrate(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            grid,
            c: [vec![0.0; grid.len()], vec![0.0; grid.len()]],
        }
    }

    pub fn at(&self, k: usize) -> [f64; 2] {
        [self.c[0][k], self.c[1][k]]
    }

    pub fn max_norm(&self) -> f64 {
        (0..self.grid.len())
            .map(|k| self.c[0][k].hypot(self.c[1][k]))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|c| c.iter().all(|x| x.is_finite()))
    }

    /// `sum_k |v_k|^2 h^2`.
    pub fn l2_sq(&self) -> f64 {
        let s: f64 = (0..self.grid.len())
            .map(|k| self.c[0][k].powi(2) + self.c[1][k].powi(2))
            .sum();
        s * self.grid.cell_area()
    }
}

impl TensorField {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![0.0; grid.len()];
        TensorField {
            grid,
            c: [z.clone(), z.clone(), z.clone(), z],
        }
    }

    pub fn uniform(grid: Grid, m: Mat2) -> Self {
        let mut t = Self::zeros(grid);
        for k in 0..grid.len() {
            t.set(k, m);
        }
        t
    }

    pub fn identity(grid: Grid) -> Self {
        Self::uniform(grid, Mat2::IDENTITY)
    }

    #[inline]
    pub fn at(&self, k: usize) -> Mat2 {
        Mat2::new(self.c[0][k], self.c[1][k], self.c[2][k], self.c[3][k])
    }

    #[inline]
    pub fn set(&mut self, k: usize, m: Mat2) {
        self.c[0][k] = m.a11;
        self.c[1][k] = m.a12;
        self.c[2][k] = m.a21;
        self.c[3][k] = m.a22;
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|c| c.iter().all(|x| x.is_finite()))
    }
}

pub fn max_abs(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Gradient of a scalar with even (Neumann) ghosts.
pub fn grad(s: &ScalarField) -> VectorField {
    grad_with(s, Parity::Even)
}

pub fn grad_with(s: &ScalarField, parity: Parity) -> VectorField {
    let g = s.grid;
    VectorField {
        grid: g,
        c: [g.dx(&s.data, parity), g.dy(&s.data, parity)],
    }
}

/// Divergence of a velocity-like field with odd (no-slip) ghosts.
pub fn div(v: &VectorField) -> ScalarField {
    div_with(v, Parity::Odd)
}

pub fn div_with(v: &VectorField, parity: Parity) -> ScalarField {
    let g = v.grid;
    let mut d = g.dx(&v.c[0], parity);
    let dy = g.dy(&v.c[1], parity);
    for (a, b) in d.iter_mut().zip(&dy) {
        *a += b;
    }
    ScalarField { grid: g, data: d }
}

/// Compact Laplacian of a scalar with even ghosts.
pub fn laplacian(s: &ScalarField) -> ScalarField {
    ScalarField {
        grid: s.grid,
        data: s.grid.laplacian(&s.data, Parity::Even),
    }
}

/// Component-wise compact Laplacian of a tensor with even ghosts.
pub fn laplacian_tensor(t: &TensorField) -> TensorField {
    let g = t.grid;
    TensorField {
        grid: g,
        c: std::array::from_fn(|a| g.laplacian(&t.c[a], Parity::Even)),
    }
}

/// Velocity gradient `L_ij = d v_i / d x_j` with odd ghosts.
pub fn velocity_gradient(v: &VectorField) -> TensorField {
    let g = v.grid;
    TensorField {
        grid: g,
        c: [
            g.dx(&v.c[0], Parity::Odd),
            g.dy(&v.c[0], Parity::Odd),
            g.dx(&v.c[1], Parity::Odd),
            g.dy(&v.c[1], Parity::Odd),
        ],
    }
}

/// Row divergence `(div T)_i = sum_j d T_ij / d x_j`.
pub fn div_tensor(t: &TensorField, parity: Parity) -> VectorField {
    let g = t.grid;
    let mut a = g.dx(&t.c[0], parity);
    let b = g.dy(&t.c[1], parity);
    let mut c = g.dx(&t.c[2], parity);
    let d = g.dy(&t.c[3], parity);
    for k in 0..g.len() {
        a[k] += b[k];
        c[k] += d[k];
    }
    VectorField { grid: g, c: [a, c] }
}

pub fn integrate(s: &ScalarField) -> f64 {
    s.integrate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(6, Boundary::Periodic).is_err());
        assert!(Grid::new(9, Boundary::Periodic).is_err());
        let g = Grid::new(16, Boundary::Walls).unwrap();
        assert_eq!(g.h * g.n as f64, 1.0);
    }

    #[test]
    fn grad_of_constant_vanishes() {
        for bc in [Boundary::Periodic, Boundary::Walls] {
            let g = Grid::new(16, bc).unwrap();
            let s = ScalarField::constant(g, 3.5);
            let gr = grad(&s);
            assert_eq!(gr.max_norm(), 0.0);
        }
    }

    #[test]
    fn grad_sine_second_order() {
        let err = |n: usize| {
            let g = Grid::new(n, Boundary::Periodic).unwrap();
            let s = g.scalar_fn(|x, _| (2.0 * PI * x).sin());
            let gr = grad(&s);
            let mut e: f64 = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let k = g.idx(i, j);
                    e = e.max((gr.c[0][k] - 2.0 * PI * (2.0 * PI * g.coord(i)).cos()).abs());
                    e = e.max(gr.c[1][k].abs());
                }
            }
            e
        };
        let ratio = err(32) / err(64);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn laplacian_exact_on_quadratic_interior() {
        let g = Grid::new(16, Boundary::Walls).unwrap();
        let s = g.scalar_fn(|x, y| x * x + y * y);
        let l = laplacian(&s);
        for j in 1..15 {
            for i in 1..15 {
                assert!((l.data[g.idx(i, j)] - 4.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn integrate_examples() {
        let g = Grid::new(32, Boundary::Periodic).unwrap();
        assert!((ScalarField::constant(g, 1.0).integrate() - 1.0).abs() < 1e-15);
        assert!((ScalarField::constant(g, -2.5).integrate() + 2.5).abs() < 1e-14);
        let s = g.scalar_fn(|x, _| (2.0 * PI * x).sin());
        assert!(s.integrate().abs() < 1e-12);
    }

    #[test]
    fn wide_derivative_transpose_identity() {
        // D_even^T = -D_odd in walls mode, D^T = -D periodic.
        let n = 8;
        for (bc, p) in [
            (Boundary::Walls, Parity::Even),
            (Boundary::Walls, Parity::Odd),
            (Boundary::Periodic, Parity::Even),
        ] {
            let g = Grid::new(n, bc).unwrap();
            let u = random(n, 1);
            let w = random(n, 2);
            for d in 0..2 {
                let du = if d == 0 { g.dx(&u, p) } else { g.dy(&u, p) };
                let dw = if d == 0 {
                    g.dx(&w, p.flip())
                } else {
                    g.dy(&w, p.flip())
                };
                let lhs: f64 = du.iter().zip(&w).map(|(a, b)| a * b).sum();
                let rhs: f64 = -u.iter().zip(&dw).map(|(a, b)| a * b).sum::<f64>();
                assert!(
                    (lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0),
                    "{bc:?} {p:?} {d}"
                );
            }
        }
    }

    #[test]
    fn walls_div_of_odd_field_telescopes() {
        let g = Grid::new(16, Boundary::Walls).unwrap();
        let v = VectorField {
            grid: g,
            c: [random(16, 3), random(16, 4)],
        };
        assert!(div(&v).integrate().abs() < 1e-12);
    }

    #[test]
    fn walls_even_div_reports_boundary_flux() {
        // integrate(div_even v) = sum of wall values of the normal component.
        let g = Grid::new(16, Boundary::Walls).unwrap();
        let n = g.n;
        let v = VectorField {
            grid: g,
            c: [random(16, 5), random(16, 6)],
        };
        let total = div_with(&v, Parity::Even).integrate();
        let mut flux = 0.0;
        for j in 0..n {
            flux += v.c[0][g.idx(n - 1, j)] - v.c[0][g.idx(0, j)];
        }
        for i in 0..n {
            flux += v.c[1][g.idx(i, n - 1)] - v.c[1][g.idx(i, 0)];
        }
        assert!((total - flux * g.h).abs() < 1e-12);
    }

    #[test]
    fn div_flux_telescopes_and_is_dissipative() {
        for bc in [Boundary::Periodic, Boundary::Walls] {
            let g = Grid::new(16, bc).unwrap();
            let u = random(16, 7);
            let k: Vec<f64> = random(16, 8).iter().map(|x| 1.5 + x).collect();
            let d = g.div_flux(&u, &k);
            assert!(g.integrate(&d).abs() < 1e-10);
            let work: f64 = g.integrate(&u.iter().zip(&d).map(|(a, b)| a * b).collect::<Vec<_>>());
            let diss = g.integrate(&g.face_grad_sq(&u, &k));
            assert!((work + diss).abs() < 1e-9 * diss);
        }
    }

    proptest! {
        #[test]
        fn grad_div_duality(seed in 0u64..1000) {
            let g = Grid::new(8, Boundary::Periodic).unwrap();
            let s = ScalarField { grid: g, data: random(8, seed) };
            let v = VectorField { grid: g, c: [random(8, seed + 1), random(8, seed + 2)] };
            let ds = div(&v);
            let gs = grad(&s);
            let a: f64 = s.data.iter().zip(&ds.data).map(|(x, y)| x * y).sum();
            let b: f64 = (0..g.len()).map(|k| gs.c[0][k] * v.c[0][k] + gs.c[1][k] * v.c[1][k]).sum();
            prop_assert!(((a + b) * g.cell_area()).abs() < 1e-12);
        }

        #[test]
        fn periodic_div_integrates_to_zero(seed in 0u64..1000) {
            let g = Grid::new(8, Boundary::Periodic).unwrap();
            let v = VectorField { grid: g, c: [random(8, seed), random(8, seed + 7)] };
            prop_assert!(div(&v).integrate().abs() < 1e-13);
        }
    }
}
