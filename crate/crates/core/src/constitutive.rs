//! Material laws and thermodynamic potentials.
//!
//! Every material function is a [`Law`] with analytic first and second
//! derivatives, so potentials and bound checks never need numerical
//! differentiation.

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::tensor2::{invert_spd, SymMat2};

/// Scalar material law of the temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    Constant(f64),
    /// `intercept + slope * s`
    Linear {
        intercept: f64,
        slope: f64,
    },
    /// `a - b / (1 + s)`
    ConcaveRational {
        a: f64,
        b: f64,
    },
    /// `scale * exp(rate * s)`
    Exponential {
        scale: f64,
        rate: f64,
    },
}

impl Law {
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            Law::Constant(c) => c,
            Law::Linear { intercept, slope } => intercept + slope * s,
            Law::ConcaveRational { a, b } => a - b / (1.0 + s),
            Law::Exponential { scale, rate } => scale * (rate * s).exp(),
        }
    }

    pub fn d1(&self, s: f64) -> f64 {
        match *self {
            Law::Constant(_) => 0.0,
            Law::Linear { slope, .. } => slope,
            Law::ConcaveRational { b, .. } => b / ((1.0 + s) * (1.0 + s)),
            Law::Exponential { scale, rate } => scale * rate * (rate * s).exp(),
        }
    }

    pub fn d2(&self, s: f64) -> f64 {
        match *self {
            Law::Constant(_) | Law::Linear { .. } => 0.0,
            Law::ConcaveRational { b, .. } => -2.0 * b / (1.0 + s).powi(3),
            Law::Exponential { scale, rate } => scale * rate * rate * (rate * s).exp(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Law::Constant(_))
            || matches!(self, Law::Linear { slope, .. } if *slope == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Constant shear modulus; temperature evolved directly.
    P1,
    /// Shear modulus linear in temperature; `e = c_v theta`.
    P2,
    /// Concave, increasing, bounded shear modulus.
    P3,
}

impl std::str::FromStr for Regime {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Ok(Regime::P1),
            "P2" => Ok(Regime::P2),
            "P3" => Ok(Regime::P3),
            _ => Err(format!("unknown regime `{s}` (expected P1, P2 or P3)")),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::P1 => "P1",
            Regime::P2 => "P2",
            Regime::P3 => "P3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    pub nu: Law,
    pub kappa: Law,
    pub delta: Law,
    pub g: Law,
    pub c_v: f64,
    pub regime: Regime,
    pub c1: f64,
    pub c2: f64,
}

impl MaterialModel {
    /// `g = 1`, `delta = 1`, `nu = kappa = 1`.
    pub fn p1() -> Self {
        MaterialModel {
            nu: Law::Constant(1.0),
            kappa: Law::Constant(1.0),
            delta: Law::Constant(1.0),
            g: Law::Constant(1.0),
            c_v: 1.0,
            regime: Regime::P1,
            c1: 1.0,
            c2: 1.0,
        }
    }

    /// `g(s) = s`, `delta = 1`, `nu = kappa = 1`.
    pub fn p2() -> Self {
        MaterialModel {
            g: Law::Linear {
                intercept: 0.0,
                slope: 1.0,
            },
            regime: Regime::P2,
            ..Self::p1()
        }
    }

    /// `g(s) = 2 - 1/(1+s)`, `delta(s) = 1 + s`, `nu = kappa = 1`, `C1 = 1`, `C2 = 2`.
    pub fn p3() -> Self {
        MaterialModel {
            nu: Law::Constant(1.0),
            kappa: Law::Constant(1.0),
            delta: Law::Linear {
                intercept: 1.0,
                slope: 1.0,
            },
            g: Law::ConcaveRational { a: 2.0, b: 1.0 },
            c_v: 1.0,
            regime: Regime::P3,
            c1: 1.0,
            c2: 2.0,
        }
    }

    pub fn preset(regime: Regime) -> Self {
        match regime {
            Regime::P1 => Self::p1(),
            Regime::P2 => Self::p2(),
            Regime::P3 => Self::p3(),
        }
    }

    pub fn with_c_v(mut self, c_v: f64) -> Self {
        self.c_v = c_v;
        self
    }

    /// Structural parameter checks (not the sampled bound checks).
    pub fn check(&self) -> Result<()> {
        if !(self.c_v > 0.0 && self.c_v.is_finite()) {
            return Err(Error::InvalidParameter {
                key: "material.c_v".into(),
                reason: format!("must be positive, got {}", self.c_v),
            });
        }
        if !(self.c1 > 0.0 && self.c2 >= self.c1) {
            return Err(Error::InvalidParameter {
                key: "material.C1".into(),
                reason: format!("need 0 < C1 <= C2, got C1 = {}, C2 = {}", self.c1, self.c2),
            });
        }
        Ok(())
    }
}

/// Free energy, entropy and internal energy densities at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potentials {
    pub psi: f64,
    pub eta: f64,
    pub e: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTemperature(theta))
    }
}

/// `f(B) = tr B - 2 - ln det B`.
pub fn elastic_energy_f(b: &SymMat2) -> Result<f64> {
    let det = b.det();
    if !(det > 0.0) || !(b.b11 > 0.0) {
        return Err(Error::NotPositiveDefinite { b11: b.b11, det });
    }
    Ok(b.trace() - 2.0 - det.ln())
}

pub fn helmholtz_psi(model: &MaterialModel, theta: f64, b: &SymMat2) -> Result<f64> {
    check_theta(theta)?;
    let f = elastic_energy_f(b)?;
    Ok(-model.c_v * theta * (theta.ln() - 1.0) + model.g.value(theta) * f)
}

pub fn entropy_eta(model: &MaterialModel, theta: f64, b: &SymMat2) -> Result<f64> {
    check_theta(theta)?;
    let f = elastic_energy_f(b)?;
    Ok(model.c_v * theta.ln() - model.g.d1(theta) * f)
}

pub fn internal_energy_e(model: &MaterialModel, theta: f64, b: &SymMat2) -> Result<f64> {
    check_theta(theta)?;
    let f = elastic_energy_f(b)?;
    Ok(internal_energy_with_f(model, theta, f))
}

pub(crate) fn internal_energy_with_f(model: &MaterialModel, theta: f64, f: f64) -> f64 {
    model.c_v * theta + (model.g.value(theta) - theta * model.g.d1(theta)) * f
}

pub fn potentials(model: &MaterialModel, theta: f64, b: &SymMat2) -> Result<Potentials> {
    Ok(Potentials {
        psi: helmholtz_psi(model, theta, b)?,
        eta: entropy_eta(model, theta, b)?,
        e: internal_energy_e(model, theta, b)?,
    })
}

/// `d psi / d B = g(theta) (I - B^{-1})`.
pub fn dpsi_db(model: &MaterialModel, theta: f64, b: &SymMat2) -> Result<SymMat2> {
    check_theta(theta)?;
    let binv = invert_spd(b)?;
    Ok((SymMat2::IDENTITY - binv).scale(model.g.value(theta)))
}

pub const H_LAMBDA_TOL: f64 = 1e-10;
pub const H_LAMBDA_MAX_DEPTH: u32 = 60;

/// `h_lambda(s) = int_0^s z^lambda g''(z) dz`.
///
/// Evaluated after the substitution `z = u^2`, which turns the integrand
/// into `2 u^(2 lambda + 1) g''(u^2)` and removes the endpoint singularity
/// of its derivatives for small `lambda`.
pub fn h_lambda(model: &MaterialModel, lambda: f64, s: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter {
            key: "lambda".into(),
            reason: format!("must be positive, got {lambda}"),
        });
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter {
            key: "s".into(),
            reason: format!("must be nonnegative, got {s}"),
        });
    }
    if s == 0.0 || matches!(model.g, Law::Constant(_) | Law::Linear { .. }) {
        return Ok(0.0);
    }
    let g = model.g;
    let integrand = |u: f64| {
        if u == 0.0 {
            0.0
        } else {
            2.0 * u.powf(2.0 * lambda + 1.0) * g.d2(u * u)
        }
    };
    adaptive_simpson(integrand, 0.0, s.sqrt(), H_LAMBDA_TOL, H_LAMBDA_MAX_DEPTH)
}

/// One named inequality of the material assumptions.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub passed: bool,
    pub first_violation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub regime: Regime,
    pub samples: Vec<f64>,
    pub checks: Vec<BoundCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "regime {} ({} samples)", self.regime, self.samples.len())?;
        for c in &self.checks {
            match c.first_violation {
                None => writeln!(f, "  {:<16} pass", c.name)?,
                Some(s) => writeln!(f, "  {:<16} FAIL (first violation at s = {s:e})", c.name)?,
            }
        }
        Ok(())
    }
}

/// Sample points: `s = 0` followed by `n_samples - 1` log-uniform points
/// spanning `[1e-6 * sample_max, sample_max]`.
pub fn sample_points(sample_max: f64, n_samples: usize) -> Vec<f64> {
    let n = n_samples.max(2);
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let lo = (1e-6 * sample_max).ln();
    let hi = sample_max.ln();
    let m = n - 1;
    for k in 0..m {
        let frac = if m == 1 {
            1.0
        } else {
            k as f64 / (m - 1) as f64
        };
        out.push((lo + frac * (hi - lo)).exp());
    }
    out
}

const SLACK: f64 = 1e-12;

fn run_check(name: &'static str, samples: &[f64], ok: impl Fn(f64) -> bool) -> BoundCheck {
    let first_violation = samples.iter().copied().find(|&s| !ok(s));
    BoundCheck {
        name,
        passed: first_violation.is_none(),
        first_violation,
    }
}

fn within(lo: f64, x: f64, hi: f64) -> bool {
    let tol = SLACK * lo.abs().max(hi.abs()).max(1.0);
    x >= lo - tol && x <= hi + tol
}

/// Samples the regime's structural assumptions and reports each named inequality.
pub fn validate_bounds(
    model: &MaterialModel,
    sample_max: f64,
    n_samples: usize,
) -> ValidationReport {
    let samples = sample_points(sample_max, n_samples);
    let (c1, c2) = (model.c1, model.c2);
    let m = model;
    let mut checks = vec![
        run_check("kappa_bounds", &samples, |s| {
            within(c1, m.kappa.value(s), c2)
        }),
        run_check("nu_bounds", &samples, |s| within(c1, m.nu.value(s), c2)),
    ];
    match model.regime {
        Regime::P1 => {
            checks.push(run_check("delta_bounds", &samples, |s| {
                within(c1, m.delta.value(s), c2)
            }));
            checks.push(run_check("g_constant", &samples, |s| {
                m.g.d1(s) == 0.0 && m.g.d2(s) == 0.0 && m.g.value(s) > 0.0
            }));
        }
        Regime::P2 => {
            checks.push(run_check("delta_bounds", &samples, |s| {
                within(c1, m.delta.value(s), c2)
            }));
            let slope = m.g.d1(0.0);
            checks.push(run_check("g_linear", &samples, |s| {
                slope > 0.0
                    && m.g.d2(s) == 0.0
                    && (m.g.value(s) - slope * s).abs() <= SLACK * (1.0 + slope * s)
            }));
        }
        Regime::P3 => {
            checks.push(run_check("delta_growth", &samples, |s| {
                within(c1 * (1.0 + s), m.delta.value(s), c2 * (1.0 + s))
            }));
            checks.push(run_check("g_concave", &samples, |s| m.g.d2(s) <= 0.0));
            checks.push(run_check("g_increasing", &samples, |s| m.g.d1(s) >= 0.0));
            checks.push(run_check("g_bounds", &samples, |s| {
                within(c1, m.g.value(s), c2)
            }));
            checks.push(run_check("g_prime_bounds", &samples, |s| {
                within(0.0, (1.0 + s) * m.g.d1(s), c2)
            }));
        }
    }
    ValidationReport {
        regime: model.regime,
        samples,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const F_DIAG41: f64 = 1.613_705_638_880_109_4; // 3 - ln 4

    #[test]
    fn f_examples() {
        assert_eq!(elastic_energy_f(&SymMat2::IDENTITY).unwrap(), 0.0);
        assert_relative_eq!(
            elastic_energy_f(&SymMat2::diag(4.0, 1.0)).unwrap(),
            3.0 - 4f64.ln()
        );
        assert_relative_eq!(
            elastic_energy_f(&SymMat2::diag(4.0, 1.0)).unwrap(),
            F_DIAG41,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            elastic_energy_f(&SymMat2::diag(2.0, 0.5)).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert!(elastic_energy_f(&SymMat2::new(1.0, 2.0, 1.0)).is_err());
    }

    #[test]
    fn psi_examples() {
        let m = MaterialModel::p3().with_c_v(2.5);
        assert_relative_eq!(helmholtz_psi(&m, 1.0, &SymMat2::IDENTITY).unwrap(), 2.5);
        let p1 = MaterialModel::p1();
        assert_relative_eq!(
            helmholtz_psi(&p1, 1.0, &SymMat2::diag(4.0, 1.0)).unwrap(),
            1.0 + F_DIAG41,
            epsilon = 1e-14
        );
        assert!(
            helmholtz_psi(&p1, std::f64::consts::E, &SymMat2::IDENTITY)
                .unwrap()
                .abs()
                < 1e-15
        );
        assert!(matches!(
            helmholtz_psi(&p1, 0.0, &SymMat2::IDENTITY),
            Err(Error::NonPositiveTemperature(_))
        ));
    }

    #[test]
    fn eta_examples() {
        let p3 = MaterialModel::p3();
        assert_eq!(entropy_eta(&p3, 1.0, &SymMat2::IDENTITY).unwrap(), 0.0);
        let p1 = MaterialModel::p1().with_c_v(1.7);
        assert_relative_eq!(
            entropy_eta(&p1, std::f64::consts::E, &SymMat2::diag(4.0, 1.0)).unwrap(),
            1.7,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            entropy_eta(&p3, 1.0, &SymMat2::diag(4.0, 1.0)).unwrap(),
            -0.25 * F_DIAG41,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            entropy_eta(&p3, 1.0, &SymMat2::diag(4.0, 1.0)).unwrap(),
            -0.40343,
            epsilon = 1e-5
        );
    }

    #[test]
    fn e_examples() {
        let p3 = MaterialModel::p3().with_c_v(1.3);
        assert_relative_eq!(
            internal_energy_e(&p3, 2.0, &SymMat2::IDENTITY).unwrap(),
            2.6
        );
        let p2 = MaterialModel::p2();
        let b = SymMat2::new(3.0, 0.7, 1.1);
        assert_eq!(internal_energy_e(&p2, 3.0, &b).unwrap(), 3.0);
        let p3 = MaterialModel::p3();
        let e = internal_energy_e(&p3, 1.0, &SymMat2::diag(4.0, 1.0)).unwrap();
        assert_relative_eq!(e, 1.0 + 1.25 * F_DIAG41, epsilon = 1e-14);
        assert_relative_eq!(e, 3.01714, epsilon = 1e-5);
    }

    #[test]
    fn dpsi_examples() {
        let p1 = MaterialModel::p1();
        assert_eq!(
            dpsi_db(&p1, 1.0, &SymMat2::IDENTITY).unwrap(),
            SymMat2::ZERO
        );
        assert_eq!(
            dpsi_db(&p1, 1.0, &SymMat2::diag(4.0, 1.0)).unwrap(),
            SymMat2::diag(0.75, 0.0)
        );
    }

    /// Centered differences of psi along each symmetric basis direction.
    /// The off-diagonal direction perturbs b12 = b21 together, so its
    /// derivative equals twice the b12 component of the gradient.
    fn fd_dpsi(m: &MaterialModel, theta: f64, b: &SymMat2, step: f64) -> SymMat2 {
        let psi = |bb: SymMat2| helmholtz_psi(m, theta, &bb).unwrap();
        let d11 = (psi(*b + SymMat2::diag(step, 0.0)) - psi(*b - SymMat2::diag(step, 0.0)))
            / (2.0 * step);
        let d22 = (psi(*b + SymMat2::diag(0.0, step)) - psi(*b - SymMat2::diag(0.0, step)))
            / (2.0 * step);
        let off = SymMat2::new(0.0, step, 0.0);
        let d12 = (psi(*b + off) - psi(*b - off)) / (2.0 * step) / 2.0;
        SymMat2::new(d11, d12, d22)
    }

    #[test]
    fn dpsi_matches_fd_at_reference_point() {
        let m = MaterialModel::p3();
        let b = SymMat2::new(2.0, 1.0, 1.0);
        let exact = dpsi_db(&m, 1.0, &b).unwrap();
        let fd = fd_dpsi(&m, 1.0, &b, 1e-5);
        assert!((exact - fd).norm_sq().sqrt() < 1e-6);
    }

    #[test]
    fn h_lambda_examples() {
        let p3 = MaterialModel::p3();
        assert_eq!(h_lambda(&p3, 0.7, 0.0).unwrap(), 0.0);
        for s in [0.5, 1.0, 4.0] {
            let exact = -s * s / ((1.0 + s) * (1.0 + s));
            assert!((h_lambda(&p3, 1.0, s).unwrap() - exact).abs() < 1e-9);
        }
        assert!((h_lambda(&p3, 1.0, 1.0).unwrap() + 0.25).abs() < 1e-9);
        assert_eq!(h_lambda(&MaterialModel::p2(), 1.3, 5.0).unwrap(), 0.0);
        assert!(h_lambda(&p3, 0.0, 1.0).is_err());
    }

    #[test]
    fn h_lambda_small_lambda_converges() {
        let p3 = MaterialModel::p3();
        // lambda -> 0 tends to g'(s) - g'(0) = 1/(1+s)^2 - 1.
        let v = h_lambda(&p3, 1e-6, 3.0).unwrap();
        assert!((v - (1.0 / 16.0 - 1.0)).abs() < 1e-4);
    }

    #[test]
    fn h_lambda_limit_beyond_one() {
        // h_lambda(inf) = -lambda (1 - lambda) pi / sin(pi lambda) for this g; exceeds 2 C2 near lambda = 2.
        let p3 = MaterialModel::p3();
        for lambda in [1.5, 1.8] {
            let limit = -lambda * (1.0 - lambda) * PI / (PI * lambda).sin();
            let s: f64 = 1e8;
            let tail = 2.0 * s.powf(lambda - 2.0) / (2.0 - lambda);
            let v = h_lambda(&p3, lambda, s).unwrap();
            assert!(
                (v - limit).abs() < tail + 1e-6,
                "lambda {lambda}: {v} vs {limit}"
            );
        }
        assert!(h_lambda(&p3, 1.8, 1e8).unwrap().abs() > 2.0 * p3.c2);
    }

    #[test]
    fn validate_presets_pass() {
        for m in [
            MaterialModel::p1(),
            MaterialModel::p2(),
            MaterialModel::p3(),
        ] {
            let r = validate_bounds(&m, 1e3, 200);
            assert!(r.all_passed(), "{r}");
        }
    }

    #[test]
    fn validate_counterexamples() {
        let mut linear = MaterialModel::p3();
        linear.g = Law::Linear {
            intercept: 0.0,
            slope: 1.0,
        };
        let r = validate_bounds(&linear, 1e3, 200);
        assert!(!r.check("g_bounds").unwrap().passed);
        assert!(r.check("g_concave").unwrap().passed);

        let mut expo = MaterialModel::p3();
        expo.g = Law::Exponential {
            scale: 1.0,
            rate: 1.0,
        };
        let r = validate_bounds(&expo, 1e3, 200);
        let c = r.check("g_concave").unwrap();
        assert!(!c.passed);
        assert_eq!(c.first_violation, Some(0.0));
    }

    #[test]
    fn sample_points_layout() {
        let s = sample_points(100.0, 5);
        assert_eq!(s.len(), 5);
        assert_eq!(s[0], 0.0);
        assert_relative_eq!(s[4], 100.0, epsilon = 1e-12);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    fn arb_spd() -> impl Strategy<Value = SymMat2> {
        (0.1..5.0f64, 0.1..5.0f64, -0.99..0.99f64)
            .prop_map(|(a, c, rho)| SymMat2::new(a, rho * (a * c).sqrt(), c))
    }

    proptest! {
        #[test]
        fn definition_chain(theta in 0.1..10.0f64, b in arb_spd()) {
            for m in [MaterialModel::p1(), MaterialModel::p2(), MaterialModel::p3().with_c_v(1.5)] {
                let p = potentials(&m, theta, &b).unwrap();
                prop_assert!((p.e - (p.psi + theta * p.eta)).abs() <= 1e-12 * (1.0 + p.e.abs()));
            }
        }

        #[test]
        fn f_nonnegative(b in arb_spd()) {
            let f = elastic_energy_f(&b).unwrap();
            prop_assert!(f >= -1e-15);
            let dist = (b - SymMat2::IDENTITY).norm_sq().sqrt();
            if dist > 1e-6 {
                prop_assert!(f > 1e-12 || dist < 2e-6);
            }
        }

        #[test]
        fn de_dtheta_at_least_one(theta in 0.1..10.0f64, b in arb_spd()) {
            let m = MaterialModel::p3();
            let step = 1e-5 * theta;
            let de = (internal_energy_e(&m, theta + step, &b).unwrap()
                - internal_energy_e(&m, theta - step, &b).unwrap()) / (2.0 * step);
            prop_assert!(de >= 1.0 - 1e-6);
        }

        #[test]
        fn h_lambda_monotone_and_bounded(lambda in 0.01..1.0f64, s in 0.0..100.0f64, ds in 0.0..10.0f64) {
            let m = MaterialModel::p3();
            let a = h_lambda(&m, lambda, s).unwrap();
            let b = h_lambda(&m, lambda, s + ds).unwrap();
            prop_assert!(b <= a + 2e-10);
            prop_assert!(a <= 1e-10 && a.abs() <= 2.0 * m.c2);
        }

        #[test]
        fn dpsi_matches_fd(theta in 0.2..5.0f64, b in arb_spd()) {
            let m = MaterialModel::p3();
            let exact = dpsi_db(&m, theta, &b).unwrap();
            let minev = 0.5 * (b.trace() - ((b.b11 - b.b22).powi(2) + 4.0 * b.b12 * b.b12).sqrt());
            prop_assume!(minev > 0.05);
            let step = 1e-4 * minev;
            let fd = fd_dpsi(&m, theta, &b, step);
            // O(step^2) truncation scaled by the third derivative ~ 1/minev^3
            prop_assert!((exact - fd).norm_sq().sqrt() <= 1e-6 * (1.0 + 1.0 / minev));
        }
    }
}
