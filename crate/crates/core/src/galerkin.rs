//! Low-mode trigonometric Galerkin model on the periodic unit square, used
//! as an independent reference for the finite-difference solver.
//!
//! Fields are expanded in real L²-orthonormal trigonometric modes. Every
//! row is the projection of the weak form onto one test mode; integrals are
//! evaluated on a uniform `M x M` quadrature grid with
//! `M = 4 n_flow + m_temp + 2`, which integrates the quartic elastic terms
//! (with a temperature factor of degree `m_temp`) without aliasing.

use crate::constitutive::{MaterialModel, Regime};
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField, TensorField, VectorField};
use crate::solver::State;
use crate::tensor2::{bb_from_f, Mat2};
use rustfft::num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};

/// Wavevectors of one half-plane, `q > 0` or `q = 0, p > 0`, with `|p|, |q| <= k`.
fn half_plane(k: usize) -> Vec<(i32, i32)> {
    let k = k as i32;
    let mut out = Vec::new();
    for q in 0..=k {
        for p in -k..=k {
            if q > 0 || p > 0 {
                out.push((p, q));
            }
        }
    }
    out
}

/// Complex coefficients `c(p, q)`, `|p|, |q| <= k`, of a real trigonometric polynomial.
#[derive(Debug, Clone, PartialEq)]
struct Spectrum {
    k: usize,
    c: Vec<Complex64>,
}

impl Spectrum {
    fn zeros(k: usize) -> Self {
        Spectrum {
            k,
            c: vec![Complex64::default(); (2 * k + 1) * (2 * k + 1)],
        }
    }

    fn idx(&self, p: i32, q: i32) -> usize {
        let w = 2 * self.k + 1;
        (q + self.k as i32) as usize * w + (p + self.k as i32) as usize
    }

    fn get(&self, p: i32, q: i32) -> Complex64 {
        self.c[self.idx(p, q)]
    }

    fn set(&mut self, p: i32, q: i32, v: Complex64) {
        let i = self.idx(p, q);
        self.c[i] = v;
        let j = self.idx(-p, -q);
        self.c[j] = v.conj();
    }

    /// `2 pi i k_dir c(k)`.
    fn derivative(&self, dir: usize) -> Spectrum {
        let mut out = self.clone();
        let k = self.k as i32;
        for q in -k..=k {
            for p in -k..=k {
                let w = if dir == 0 { p } else { q } as f64;
                let i = self.idx(p, q);
                out.c[i] = self.c[i] * Complex64::new(0.0, 2.0 * PI * w);
            }
        }
        out
    }
}

/// Separable discrete Fourier transforms between spectra and the quadrature grid.
#[derive(Debug, Clone)]
struct Transform {
    m: usize,
    kmax: usize,
    /// `e^{2 pi i w a / M}` for `w in -kmax..=kmax`, `a in 0..M`.
    table: Vec<Complex64>,
}

impl Transform {
    fn new(m: usize, kmax: usize) -> Self {
        let mut table = Vec::with_capacity((2 * kmax + 1) * m);
        for w in -(kmax as i64)..=kmax as i64 {
            for a in 0..m {
                let ang = 2.0 * PI * (w as f64) * (a as f64) / m as f64;
                table.push(Complex64::new(ang.cos(), ang.sin()));
            }
        }
        Transform { m, kmax, table }
    }

    fn e(&self, w: i32, a: usize) -> Complex64 {
        self.table[(w + self.kmax as i32) as usize * self.m + a]
    }

    /// Values at `(a/M, b/M)`, stored as `b * M + a`.
    fn synth(&self, s: &Spectrum) -> Vec<f64> {
        let m = self.m;
        let k = s.k as i32;
        let w = 2 * s.k + 1;
        // g(p, b) = sum_q c(p, q) e_q(b)
        let mut g = vec![Complex64::default(); w * m];
        for p in -k..=k {
            for q in -k..=k {
                let c = s.get(p, q);
                if c == Complex64::default() {
                    continue;
                }
                let row = &mut g[(p + k) as usize * m..(p + k + 1) as usize * m];
                for (b, r) in row.iter_mut().enumerate() {
                    *r += c * self.e(q, b);
                }
            }
        }
        let mut out = vec![0.0; m * m];
        for b in 0..m {
            for a in 0..m {
                let mut acc = 0.0;
                for p in -k..=k {
                    let z = g[(p + k) as usize * m + b] * self.e(p, a);
                    acc += z.re;
                }
                out[b * m + a] = acc;
            }
        }
        out
    }

    /// Discrete projection onto `e^{2 pi i k.x}`, `|p|, |q| <= k`.
    fn analyze(&self, f: &[f64], k: usize) -> Spectrum {
        let m = self.m;
        let ki = k as i32;
        let w = 2 * k + 1;
        // h(p, b) = sum_a f(a, b) e_{-p}(a)
        let mut h = vec![Complex64::default(); w * m];
        for b in 0..m {
            let row = &f[b * m..(b + 1) * m];
            for p in -ki..=ki {
                let mut acc = Complex64::default();
                for (a, &x) in row.iter().enumerate() {
                    acc += self.e(-p, a) * x;
                }
                h[(p + ki) as usize * m + b] = acc;
            }
        }
        let mut out = Spectrum::zeros(k);
        let scale = 1.0 / (m * m) as f64;
        for q in -ki..=ki {
            for p in -ki..=ki {
                let mut acc = Complex64::default();
                for b in 0..m {
                    acc += h[(p + ki) as usize * m + b] * self.e(-q, b);
                }
                let i = out.idx(p, q);
                out.c[i] = acc * scale;
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct GalerkinBasis {
    pub n_flow: usize,
    pub m_temp: usize,
    /// Quadrature points per axis.
    pub m: usize,
    flow_waves: Vec<(i32, i32)>,
    temp_waves: Vec<(i32, i32)>,
    transform: Transform,
}

impl GalerkinBasis {
    pub fn new(n_flow: usize, m_temp: usize) -> Result<Self> {
        if n_flow == 0 || m_temp == 0 {
            return Err(Error::InvalidParameter {
                key: "galerkin.n_flow".into(),
                reason: "mode cutoffs must be positive".into(),
            });
        }
        let m = 4 * n_flow + m_temp + 2;
        Ok(GalerkinBasis {
            n_flow,
            m_temp,
            m,
            flow_waves: half_plane(n_flow),
            temp_waves: half_plane(m_temp),
            transform: Transform::new(m, n_flow.max(m_temp)),
        })
    }

    /// Two mean-flow modes plus a sine and cosine mode per half-plane wavevector.
    pub fn velocity_dim(&self) -> usize {
        2 + 2 * self.flow_waves.len()
    }

    pub fn scalar_flow_dim(&self) -> usize {
        1 + 2 * self.flow_waves.len()
    }

    pub fn tensor_dim(&self) -> usize {
        4 * self.scalar_flow_dim()
    }

    pub fn temp_dim(&self) -> usize {
        1 + 2 * self.temp_waves.len()
    }

    fn tangent(p: i32, q: i32) -> [f64; 2] {
        let n = ((p * p + q * q) as f64).sqrt();
        [-(q as f64) / n, p as f64 / n]
    }

    fn scalar_to_spectrum(waves: &[(i32, i32)], k: usize, c: &[f64]) -> Spectrum {
        let mut s = Spectrum::zeros(k);
        s.set(0, 0, Complex64::new(c[0], 0.0));
        for (i, &(p, q)) in waves.iter().enumerate() {
            let (a, b) = (c[1 + 2 * i], c[2 + 2 * i]);
            s.set(p, q, Complex64::new(a, -b) / SQRT_2);
        }
        s
    }

    fn spectrum_to_scalar(waves: &[(i32, i32)], s: &Spectrum) -> Vec<f64> {
        let mut c = vec![0.0; 1 + 2 * waves.len()];
        c[0] = s.get(0, 0).re;
        for (i, &(p, q)) in waves.iter().enumerate() {
            let z = s.get(p, q);
            c[1 + 2 * i] = SQRT_2 * z.re;
            c[2 + 2 * i] = -SQRT_2 * z.im;
        }
        c
    }

    fn velocity_to_spectra(&self, alpha: &[f64]) -> [Spectrum; 2] {
        let k = self.n_flow;
        let mut out = [Spectrum::zeros(k), Spectrum::zeros(k)];
        out[0].set(0, 0, Complex64::new(alpha[0], 0.0));
        out[1].set(0, 0, Complex64::new(alpha[1], 0.0));
        for (i, &(p, q)) in self.flow_waves.iter().enumerate() {
            let z = Complex64::new(alpha[2 + 2 * i], -alpha[3 + 2 * i]) / SQRT_2;
            let t = Self::tangent(p, q);
            out[0].set(p, q, z * t[0]);
            out[1].set(p, q, z * t[1]);
        }
        out
    }

    /// L² projection of a vector spectrum onto the divergence-free modes.
    fn spectra_to_velocity(&self, s: &[Spectrum; 2]) -> Vec<f64> {
        let mut alpha = vec![0.0; self.velocity_dim()];
        alpha[0] = s[0].get(0, 0).re;
        alpha[1] = s[1].get(0, 0).re;
        for (i, &(p, q)) in self.flow_waves.iter().enumerate() {
            let t = Self::tangent(p, q);
            let z = s[0].get(p, q) * t[0] + s[1].get(p, q) * t[1];
            alpha[2 + 2 * i] = SQRT_2 * z.re;
            alpha[3 + 2 * i] = -SQRT_2 * z.im;
        }
        alpha
    }

    fn tensor_to_spectra(&self, beta: &[f64]) -> [Spectrum; 4] {
        let d = self.scalar_flow_dim();
        std::array::from_fn(|a| {
            Self::scalar_to_spectrum(&self.flow_waves, self.n_flow, &beta[a * d..(a + 1) * d])
        })
    }

    fn temp_to_spectrum(&self, gamma: &[f64]) -> Spectrum {
        Self::scalar_to_spectrum(&self.temp_waves, self.m_temp, gamma)
    }

    /// Quadrature point coordinates `(a/M, b/M)` for linear index `b * M + a`.
    pub fn quad_point(&self, idx: usize) -> (f64, f64) {
        let m = self.m as f64;
        ((idx % self.m) as f64 / m, (idx / self.m) as f64 / m)
    }

    /// Projects analytic initial data onto the basis.
    pub fn project<Fv, Ff, Ft>(&self, v: Fv, f: Ff, theta: Ft, t: f64) -> CoeffState
    where
        Fv: Fn(f64, f64) -> [f64; 2],
        Ff: Fn(f64, f64) -> Mat2,
        Ft: Fn(f64, f64) -> f64,
    {
        let pts: Vec<(f64, f64)> = (0..self.m * self.m).map(|i| self.quad_point(i)).collect();
        let tr = &self.transform;
        let vs: [Spectrum; 2] = std::array::from_fn(|c| {
            let vals: Vec<f64> = pts.iter().map(|&(x, y)| v(x, y)[c]).collect();
            tr.analyze(&vals, self.n_flow)
        });
        let mut beta = Vec::with_capacity(self.tensor_dim());
        for a in 0..4 {
            let vals: Vec<f64> = pts.iter().map(|&(x, y)| mat_entry(&f(x, y), a)).collect();
            beta.extend(Self::spectrum_to_scalar(
                &self.flow_waves,
                &tr.analyze(&vals, self.n_flow),
            ));
        }
        let vals: Vec<f64> = pts.iter().map(|&(x, y)| theta(x, y)).collect();
        let gamma = Self::spectrum_to_scalar(&self.temp_waves, &tr.analyze(&vals, self.m_temp));
        CoeffState {
            alpha: self.spectra_to_velocity(&vs),
            beta,
            gamma,
            t,
        }
    }

    /// Evaluates the expansion at arbitrary points by direct summation.
    pub fn evaluate(&self, c: &CoeffState, x: f64, y: f64) -> ([f64; 2], Mat2, f64) {
        let phase = |p: i32, q: i32| {
            let ang = 2.0 * PI * (p as f64 * x + q as f64 * y);
            (SQRT_2 * ang.cos(), SQRT_2 * ang.sin())
        };
        let mut v = [c.alpha[0], c.alpha[1]];
        for (i, &(p, q)) in self.flow_waves.iter().enumerate() {
            let (cs, sn) = phase(p, q);
            let amp = c.alpha[2 + 2 * i] * cs + c.alpha[3 + 2 * i] * sn;
            let t = Self::tangent(p, q);
            v[0] += amp * t[0];
            v[1] += amp * t[1];
        }
        let d = self.scalar_flow_dim();
        let scalar = |coef: &[f64], waves: &[(i32, i32)]| {
            let mut s = coef[0];
            for (i, &(p, q)) in waves.iter().enumerate() {
                let (cs, sn) = phase(p, q);
                s += coef[1 + 2 * i] * cs + coef[2 + 2 * i] * sn;
            }
            s
        };
        let fe: [f64; 4] =
            std::array::from_fn(|a| scalar(&c.beta[a * d..(a + 1) * d], &self.flow_waves));
        let th = scalar(&c.gamma, &self.temp_waves);
        (v, Mat2::new(fe[0], fe[1], fe[2], fe[3]), th)
    }

    /// Samples the expansion at the cell centers of `grid`.
    pub fn to_state(&self, c: &CoeffState, grid: Grid) -> State {
        let mut s = State::stationary(grid, 1.0);
        for k in 0..grid.len() {
            let (x, y) = (grid.coord(k % grid.n), grid.coord(k / grid.n));
            let (v, f, th) = self.evaluate(c, x, y);
            s.v.c[0][k] = v[0];
            s.v.c[1][k] = v[1];
            s.f.set(k, f);
            s.theta.data[k] = th;
        }
        s.t = c.t;
        s
    }
}

fn mat_entry(m: &Mat2, a: usize) -> f64 {
    [m.a11, m.a12, m.a21, m.a22][a]
}

/// Coefficients of velocity (`alpha`), the four deformation components
/// (`beta`, component-major) and temperature (`gamma`).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffState {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub t: f64,
}

impl CoeffState {
    fn axpy(&self, a: f64, d: &CoeffState) -> CoeffState {
        let f = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p + a * q).collect();
        CoeffState {
            alpha: f(&self.alpha, &d.alpha),
            beta: f(&self.beta, &d.beta),
            gamma: f(&self.gamma, &d.gamma),
            t: self.t + a,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.alpha
            .iter()
            .chain(&self.beta)
            .chain(&self.gamma)
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.alpha
            .iter()
            .chain(&self.beta)
            .chain(&self.gamma)
            .all(|x| x.is_finite())
    }
}

fn check_model(model: &MaterialModel) -> Result<()> {
    if model.regime == Regime::P3 {
        return Err(Error::IncompatibleScenario(
            "the Galerkin reference evolves temperature directly and supports regimes P1 and P2"
                .into(),
        ));
    }
    Ok(())
}

/// Time derivative of every coefficient. The `t` field of the result is 1.
pub fn assemble_rhs(
    model: &MaterialModel,
    basis: &GalerkinBasis,
    epsilon: f64,
    c: &CoeffState,
) -> Result<CoeffState> {
    check_model(model)?;
    let tr = &basis.transform;
    let kf = basis.n_flow;
    let kt = basis.m_temp;
    let npts = basis.m * basis.m;

    let vs = basis.velocity_to_spectra(&c.alpha);
    let fs = basis.tensor_to_spectra(&c.beta);
    let ts = basis.temp_to_spectrum(&c.gamma);

    let v: [Vec<f64>; 2] = std::array::from_fn(|i| tr.synth(&vs[i]));
    // L_ij = d_j v_i, row-major
    let l: [Vec<f64>; 4] = std::array::from_fn(|a| tr.synth(&vs[a / 2].derivative(a % 2)));
    let f: [Vec<f64>; 4] = std::array::from_fn(|a| tr.synth(&fs[a]));
    let th = tr.synth(&ts);
    let gth: [Vec<f64>; 2] = std::array::from_fn(|d| tr.synth(&ts.derivative(d)));

    let mut mom_flux: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; npts]);
    let mut f_flux: [Vec<f64>; 8] = std::array::from_fn(|_| vec![0.0; npts]);
    let mut f_src: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; npts]);
    let mut t_flux: [Vec<f64>; 2] = std::array::from_fn(|_| vec![0.0; npts]);
    let mut t_src = vec![0.0; npts];
    let inv_cv = 1.0 / model.c_v;
    for k in 0..npts {
        let theta = th[k];
        if !(theta > 0.0) {
            return Err(Error::NonPositiveTemperature(theta));
        }
        let vel = [v[0][k], v[1][k]];
        let lk = Mat2::new(l[0][k], l[1][k], l[2][k], l[3][k]);
        let fk = Mat2::new(f[0][k], f[1][k], f[2][k], f[3][k]);
        let b = bb_from_f(&fk);
        let d = lk.sym();
        let nu = model.nu.value(theta);
        let g = model.g.value(theta);
        let delta = model.delta.value(theta);
        let stress = d.to_mat().scale(2.0 * nu) + b.to_mat().scale(2.0 * g);
        for i in 0..2 {
            for j in 0..2 {
                mom_flux[2 * i + j][k] = mat_entry(&stress, 2 * i + j) - vel[i] * vel[j];
            }
        }
        for a in 0..4 {
            for j in 0..2 {
                f_flux[2 * a + j][k] = -mat_entry(&fk, a) * vel[j];
            }
        }
        let src = lk * fk - (b.to_mat() * fk - fk).scale(0.5 * delta);
        for a in 0..4 {
            f_src[a][k] = mat_entry(&src, a);
        }
        let kappa = model.kappa.value(theta);
        for j in 0..2 {
            t_flux[j][k] = -theta * vel[j] + inv_cv * kappa * gth[j][k];
        }
        let elastic = match model.regime {
            Regime::P2 => 2.0 * g * b.inner(&lk),
            _ => g * delta * b.minus_identity().norm_sq(),
        };
        t_src[k] = inv_cv * (2.0 * nu * d.norm_sq() + elastic);
    }

    let div_of = |flux: &[Vec<f64>], kk: usize| -> Spectrum {
        let mut out = tr.analyze(&flux[0], kk).derivative(0);
        let y = tr.analyze(&flux[1], kk).derivative(1);
        for (o, z) in out.c.iter_mut().zip(&y.c) {
            *o += z;
        }
        out
    };

    let dv: [Spectrum; 2] = std::array::from_fn(|i| div_of(&mom_flux[2 * i..2 * i + 2], kf));
    let alpha = basis.spectra_to_velocity(&dv);

    let mut beta = Vec::with_capacity(basis.tensor_dim());
    for a in 0..4 {
        let mut s = div_of(&f_flux[2 * a..2 * a + 2], kf);
        let src = tr.analyze(&f_src[a], kf);
        let ki = kf as i32;
        for q in -ki..=ki {
            for p in -ki..=ki {
                let i = s.idx(p, q);
                let k2 = (4.0 * PI * PI) * (p * p + q * q) as f64;
                s.c[i] += src.c[i] - fs[a].c[i] * (epsilon * k2);
            }
        }
        beta.extend(GalerkinBasis::spectrum_to_scalar(&basis.flow_waves, &s));
    }

    let mut ds = div_of(&t_flux, kt);
    let src = tr.analyze(&t_src, kt);
    for (o, z) in ds.c.iter_mut().zip(&src.c) {
        *o += z;
    }
    let gamma = GalerkinBasis::spectrum_to_scalar(&basis.temp_waves, &ds);
    Ok(CoeffState {
        alpha,
        beta,
        gamma,
        t: 1.0,
    })
}

pub const BLOWUP: f64 = 1e12;

/// Classical fourth-order Runge-Kutta from `c0.t` to `t_end`; returns every
/// accepted state including the first. The last step is shortened to land
/// on `t_end`.
pub fn integrate_rk4(
    model: &MaterialModel,
    basis: &GalerkinBasis,
    epsilon: f64,
    c0: &CoeffState,
    dt: f64,
    t_end: f64,
) -> Result<Vec<CoeffState>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter {
            key: "galerkin.dt".into(),
            reason: "must be positive".into(),
        });
    }
    let mut out = vec![c0.clone()];
    let mut c = c0.clone();
    while c.t < t_end * (1.0 - 1e-14) {
        let h = dt.min(t_end - c.t);
        let k1 = assemble_rhs(model, basis, epsilon, &c)?;
        let k2 = assemble_rhs(model, basis, epsilon, &c.axpy(0.5 * h, &k1))?;
        let k3 = assemble_rhs(model, basis, epsilon, &c.axpy(0.5 * h, &k2))?;
        let k4 = assemble_rhs(model, basis, epsilon, &c.axpy(h, &k3))?;
        let mut next = c.axpy(h / 6.0, &k1);
        next = next.axpy(h / 3.0, &k2);
        next = next.axpy(h / 3.0, &k3);
        next = next.axpy(h / 6.0, &k4);
        next.t = c.t + h;
        if (next.t - t_end).abs() < 1e-14 * t_end.max(1.0) {
            next.t = t_end;
        }
        let big = next.max_abs();
        if !(big <= BLOWUP) || !next.is_finite() {
            return Err(Error::BlowupDetected {
                t: next.t,
                value: big,
            });
        }
        out.push(next.clone());
        c = next;
    }
    Ok(out)
}

/// Stable explicit step for the stiffest retained diffusive mode.
pub fn stable_dt(
    model: &MaterialModel,
    basis: &GalerkinBasis,
    epsilon: f64,
    theta_max: f64,
) -> f64 {
    let k = basis.n_flow.max(basis.m_temp) as f64;
    let lam = 8.0 * PI * PI * k * k;
    let diff = model
        .nu
        .value(theta_max)
        .max(model.kappa.value(theta_max) / model.c_v)
        .max(epsilon)
        .max(1.0);
    1.0 / (lam * diff)
}

/// Smooth analytic initial data with a few low modes in every field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowModeData {
    pub a_v: f64,
    pub a_theta: f64,
    pub a_f: f64,
}

impl Default for LowModeData {
    fn default() -> Self {
        LowModeData {
            a_v: 0.5,
            a_theta: 0.2,
            a_f: 0.2,
        }
    }
}

impl LowModeData {
    /// Velocity `(d_y psi, -d_x psi)` of
    /// `psi = a_v / (2 pi) [sin 2pi x sin 2pi y + 1/2 cos 2pi(x + 2y)]`.
    pub fn velocity(&self, x: f64, y: f64) -> [f64; 2] {
        let w = 2.0 * PI;
        let a = self.a_v;
        let s = (w * (x + 2.0 * y)).sin();
        [
            a * ((w * x).sin() * (w * y).cos() - s),
            -a * ((w * x).cos() * (w * y).sin() - 0.5 * s),
        ]
    }

    pub fn deformation(&self, x: f64, y: f64) -> Mat2 {
        let w = 2.0 * PI;
        let a = self.a_f;
        Mat2::new(
            1.0 + a * (w * y).sin(),
            0.5 * a * (w * x).cos(),
            0.3 * a * (w * (x + y)).sin(),
            1.0 - 0.5 * a * (w * y).cos(),
        )
    }

    pub fn temperature(&self, x: f64, y: f64) -> f64 {
        let w = 2.0 * PI;
        1.0 + self.a_theta * ((w * x).cos() + 0.5 * (w * (x - y)).sin())
    }

    pub fn coefficients(&self, basis: &GalerkinBasis) -> CoeffState {
        basis.project(
            |x, y| self.velocity(x, y),
            |x, y| self.deformation(x, y),
            |x, y| self.temperature(x, y),
            0.0,
        )
    }

    pub fn sample(&self, grid: Grid) -> State {
        let mut s = State::stationary(grid, 1.0);
        for k in 0..grid.len() {
            let (x, y) = (grid.coord(k % grid.n), grid.coord(k / grid.n));
            let v = self.velocity(x, y);
            s.v.c[0][k] = v[0];
            s.v.c[1][k] = v[1];
            s.f.set(k, self.deformation(x, y));
            s.theta.data[k] = self.temperature(x, y);
        }
        s
    }
}

/// Identifies a run so comparisons of unrelated runs are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTag {
    pub model: MaterialModel,
    pub epsilon: f64,
    pub data: LowModeData,
}

pub struct GalerkinTrajectory {
    pub tag: RunTag,
    pub basis: GalerkinBasis,
    pub states: Vec<CoeffState>,
}

pub struct FdTrajectory {
    pub tag: RunTag,
    pub states: Vec<State>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    pub t: f64,
    pub v: f64,
    pub theta: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub rows: Vec<Discrepancy>,
}

impl DiscrepancyReport {
    pub const CSV_HEADER: &'static str = "t,disc_v,disc_theta,disc_F";

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.t, r.v, r.theta, r.f
            ));
        }
        s
    }

    pub fn last(&self) -> Option<Discrepancy> {
        self.rows.last().copied()
    }
}

fn l2_diff(grid: Grid, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() * grid.cell_area()
}

/// L² discrepancies on the finite-difference grid at every time both
/// trajectories share.
pub fn compare_to_fd(gal: &GalerkinTrajectory, fd: &FdTrajectory) -> Result<DiscrepancyReport> {
    if gal.tag != fd.tag {
        return Err(Error::IncompatibleScenario(
            "Galerkin and finite-difference runs use different models or initial data".into(),
        ));
    }
    let mut rows = Vec::new();
    for s in &fd.states {
        let Some(c) = gal
            .states
            .iter()
            .find(|c| (c.t - s.t).abs() <= 1e-12 * s.t.abs().max(1.0))
        else {
            continue;
        };
        let grid = s.grid();
        let r = gal.basis.to_state(c, grid);
        let v = (l2_diff(grid, &r.v.c[0], &s.v.c[0]) + l2_diff(grid, &r.v.c[1], &s.v.c[1])).sqrt();
        let th = l2_diff(grid, &r.theta.data, &s.theta.data).sqrt();
        let f = (0..4)
            .map(|a| l2_diff(grid, &r.f.c[a], &s.f.c[a]))
            .sum::<f64>()
            .sqrt();
        rows.push(Discrepancy {
            t: s.t,
            v,
            theta: th,
            f,
        });
    }
    if rows.is_empty() {
        return Err(Error::IncompatibleScenario(
            "the trajectories share no output time".into(),
        ));
    }
    Ok(DiscrepancyReport { rows })
}

/// Converts sampled fields to plain field types for callers that only need values.
pub fn sampled_fields(
    basis: &GalerkinBasis,
    c: &CoeffState,
    grid: Grid,
) -> (VectorField, TensorField, ScalarField) {
    let s = basis.to_state(c, grid);
    (s.v, s.f, s.theta)
}
