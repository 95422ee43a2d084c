//! Manufactured solutions: analytic fields, the sources that make them exact
//! solutions of the regularized system, and grid-refinement studies.

use crate::constitutive::{elastic_energy_f, internal_energy_with_f, MaterialModel, Regime};
use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, ScalarField, TensorField, VectorField};
use crate::solver::{DtPolicy, Forcing, Solver, SolverConfig, Sources, State, TemperatureVariable};
use crate::tensor2::{bb_from_f, frob_inner, Mat2};
use std::f64::consts::PI;
use std::fmt;

/// Symmetric direction of the deformation perturbation, `|S| = 1`.
const S_DIR: Mat2 = Mat2 {
    a11: 0.5,
    a12: 0.5,
    a21: 0.5,
    a22: 0.5,
};

/// Time step of the fourth-order time-derivative stencil.
const TAU: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    /// Stream-function amplitude.
    pub a_v: f64,
    pub a_theta: f64,
    pub a_f: f64,
    pub k: u32,
    pub regime: Regime,
}

impl ManufacturedCase {
    pub fn new(regime: Regime) -> Self {
        ManufacturedCase {
            a_v: 0.05,
            a_theta: 0.2,
            a_f: 0.2,
            k: 1,
            regime,
        }
    }

    pub fn zero(regime: Regime) -> Self {
        ManufacturedCase {
            a_v: 0.0,
            a_theta: 0.0,
            a_f: 0.0,
            k: 1,
            regime,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |key: &str, reason: &str| {
            Err(Error::InvalidParameter {
                key: key.into(),
                reason: reason.into(),
            })
        };
        if !(self.a_f.abs() < 0.3) {
            return bad("mms.a_F", "must satisfy |a_F| < 0.3");
        }
        if !(self.a_theta.abs() < 0.5) {
            return bad("mms.a_theta", "must satisfy |a_theta| < 0.5");
        }
        if !self.a_v.is_finite() {
            return bad("mms.a_v", "must be finite");
        }
        if self.k == 0 {
            return bad("mms.k", "must be a positive integer");
        }
        Ok(())
    }

    /// Point values `(v, F, theta)` of the exact solution.
    pub fn point(&self, x: f64, y: f64, t: f64) -> ([f64; 2], Mat2, f64) {
        let w = 2.0 * PI * self.k as f64;
        let (sx, cx) = (w * x).sin_cos();
        let (sy, cy) = (w * y).sin_cos();
        let ct = t.cos();
        let v = [self.a_v * w * sx * cy * ct, -self.a_v * w * cx * sy * ct];
        let f = Mat2::IDENTITY + S_DIR.scale(self.a_f * sx * sy * ct);
        let theta = 1.0 + self.a_theta * cx * ct;
        (v, f, theta)
    }
}

/// Exact solution sampled at cell centers.
pub fn exact_solution(case: &ManufacturedCase, grid: Grid, t: f64) -> State {
    let mut s = State::stationary(grid, 1.0);
    for k in 0..grid.len() {
        let (x, y) = (grid.coord(k % grid.n), grid.coord(k / grid.n));
        let (v, f, th) = case.point(x, y, t);
        s.v.c[0][k] = v[0];
        s.v.c[1][k] = v[1];
        s.f.set(k, f);
        s.theta.data[k] = th;
    }
    s.t = t;
    s
}

/// Pointwise residuals of every equation at the exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResidual {
    pub momentum: [f64; 2],
    pub f: Mat2,
    /// Temperature equation residual on the direct path.
    pub theta: f64,
    /// Internal-energy equation residual.
    pub e: f64,
}

#[derive(Clone, Copy)]
struct Sample {
    v: [f64; 2],
    f: Mat2,
    theta: f64,
}

fn d1(m2: f64, m1: f64, p1: f64, p2: f64, s: f64) -> f64 {
    (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * s)
}

fn d2(m2: f64, m1: f64, c: f64, p1: f64, p2: f64, s: f64) -> f64 {
    (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * s * s)
}

const OFFSETS: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];

/// Residuals at `(x, y, t)` from fourth-order difference jets with spatial
/// spacing `s`. Flux and stress divergences are differentiated as composite
/// functions; the viscous and conductive terms use the chain rule on the
/// jets. The velocity is an exact curl, so `div v = 0` is used analytically.
pub fn point_residual(
    model: &MaterialModel,
    case: &ManufacturedCase,
    epsilon: f64,
    x: f64,
    y: f64,
    t: f64,
    s: f64,
) -> Result<PointResidual> {
    let smp = |x: f64, y: f64, t: f64| {
        let (v, f, theta) = case.point(x, y, t);
        Sample { v, f, theta }
    };
    let c = smp(x, y, t);
    let xs: Vec<Sample> = OFFSETS.iter().map(|o| smp(x + o * s, y, t)).collect();
    let ys: Vec<Sample> = OFFSETS.iter().map(|o| smp(x, y + o * s, t)).collect();
    let ts: Vec<Sample> = OFFSETS.iter().map(|o| smp(x, y, t + o * TAU)).collect();

    let first = |pts: &[Sample], step: f64, q: &dyn Fn(&Sample) -> f64| {
        d1(q(&pts[0]), q(&pts[1]), q(&pts[2]), q(&pts[3]), step)
    };
    let second = |pts: &[Sample], q: &dyn Fn(&Sample) -> f64| {
        d2(q(&pts[0]), q(&pts[1]), q(&c), q(&pts[2]), q(&pts[3]), s)
    };
    let grad = |q: &dyn Fn(&Sample) -> f64| [first(&xs, s, q), first(&ys, s, q)];
    let lap = |q: &dyn Fn(&Sample) -> f64| second(&xs, q) + second(&ys, q);
    // div(q v) for a scalar composite q
    let flux_div = |q: &dyn Fn(&Sample) -> f64| {
        first(&xs, s, &|p| q(p) * p.v[0]) + first(&ys, s, &|p| q(p) * p.v[1])
    };
    let dt = |q: &dyn Fn(&Sample) -> f64| first(&ts, TAU, q);

    let th = c.theta;
    let m = model;
    let mat = |p: &Sample, a: usize| [p.f.a11, p.f.a12, p.f.a21, p.f.a22][a];

    // Velocity gradient L_ij = d_j v_i.
    let gv0 = grad(&|p| p.v[0]);
    let gv1 = grad(&|p| p.v[1]);
    let l = Mat2::new(gv0[0], gv0[1], gv1[0], gv1[1]);
    let d = l.sym();
    let gth = grad(&|p| p.theta);

    // Momentum.
    let mut momentum = [0.0; 2];
    for i in 0..2 {
        let vt = dt(&|p| p.v[i]);
        let adv = flux_div(&|p| p.v[i]);
        let lap_v = lap(&|p| p.v[i]);
        let dv_grad_th = if i == 0 {
            d.b11 * gth[0] + d.b12 * gth[1]
        } else {
            d.b12 * gth[0] + d.b22 * gth[1]
        };
        let viscous = 2.0 * m.nu.d1(th) * dv_grad_th + m.nu.value(th) * lap_v;
        let elastic_row = |p: &Sample, j: usize| {
            let bb = bb_from_f(&p.f);
            let b = [[bb.b11, bb.b12], [bb.b12, bb.b22]];
            2.0 * m.g.value(p.theta) * b[i][j]
        };
        let elastic = first(&xs, s, &|p| elastic_row(p, 0)) + first(&ys, s, &|p| elastic_row(p, 1));
        momentum[i] = vt + adv - viscous - elastic;
    }

    // Deformation gradient.
    let b = bb_from_f(&c.f);
    let relax = (b.to_mat() * c.f - c.f).scale(0.5 * m.delta.value(th));
    let lf = l * c.f;
    let mut fres = [0.0; 4];
    let lf_a = [lf.a11, lf.a12, lf.a21, lf.a22];
    let relax_a = [relax.a11, relax.a12, relax.a21, relax.a22];
    for a in 0..4 {
        let ft = dt(&|p| mat(p, a));
        let adv = flux_div(&|p| mat(p, a));
        let diff = lap(&|p| mat(p, a));
        fres[a] = ft + adv - lf_a[a] + relax_a[a] - epsilon * diff;
    }
    let f = Mat2::new(fres[0], fres[1], fres[2], fres[3]);

    // Heat.
    let conduction = m.kappa.d1(th) * (gth[0] * gth[0] + gth[1] * gth[1])
        + m.kappa.value(th) * lap(&|p| p.theta);
    let viscous_heat = 2.0 * m.nu.value(th) * d.norm_sq();
    let elastic_heat = if m.regime == Regime::P2 {
        2.0 * m.g.value(th) * b.inner(&l)
    } else {
        m.g.value(th) * m.delta.value(th) * b.minus_identity().norm_sq()
    };
    let theta = dt(&|p| p.theta) + flux_div(&|p| p.theta)
        - (conduction + viscous_heat + elastic_heat) / m.c_v;

    let energy = |p: &Sample| -> f64 {
        let fb = elastic_energy_f(&bb_from_f(&p.f)).unwrap_or(f64::NAN);
        internal_energy_with_f(m, p.theta, fb)
    };
    let stress = d.to_mat().scale(2.0 * m.nu.value(th)) + b.to_mat().scale(2.0 * m.g.value(th));
    let e = dt(&energy) + flux_div(&energy) - conduction - frob_inner(&stress, &l);
    if !(e.is_finite() && theta.is_finite()) {
        return Err(Error::NotPositiveDefinite {
            b11: b.b11,
            det: b.det(),
        });
    }
    Ok(PointResidual {
        momentum,
        f,
        theta,
        e,
    })
}

/// Source fields on `grid` at time `t`, oversampling factor 3.
pub fn manufactured_sources(
    model: &MaterialModel,
    case: &ManufacturedCase,
    epsilon: f64,
    grid: Grid,
    t: f64,
) -> Result<(VectorField, TensorField, ScalarField, ScalarField)> {
    let s = grid.h / 3.0;
    let mut mv = VectorField::zeros(grid);
    let mut mf = TensorField::zeros(grid);
    let mut th = ScalarField::zeros(grid);
    let mut e = ScalarField::zeros(grid);
    for k in 0..grid.len() {
        let (x, y) = (grid.coord(k % grid.n), grid.coord(k / grid.n));
        let r = point_residual(model, case, epsilon, x, y, t, s)?;
        mv.c[0][k] = r.momentum[0];
        mv.c[1][k] = r.momentum[1];
        mf.set(k, r.f);
        th.data[k] = r.theta;
        e.data[k] = r.e;
    }
    Ok((mv, mf, th, e))
}

/// Tabulated sources on `[0, T]`, interpolated with four-point Lagrange
/// polynomials in time.
pub struct MmsForcing {
    times: Vec<f64>,
    step: f64,
    momentum: Vec<VectorField>,
    f: Vec<TensorField>,
    theta: Vec<ScalarField>,
    e: Vec<ScalarField>,
}

impl MmsForcing {
    pub const INTERVALS: usize = 32;

    pub fn new(
        model: &MaterialModel,
        case: &ManufacturedCase,
        epsilon: f64,
        grid: Grid,
        t_end: f64,
    ) -> Result<Self> {
        let m = Self::INTERVALS;
        let step = t_end / m as f64;
        let mut out = MmsForcing {
            times: Vec::new(),
            step,
            momentum: Vec::new(),
            f: Vec::new(),
            theta: Vec::new(),
            e: Vec::new(),
        };
        for j in 0..=m {
            let t = j as f64 * step;
            let (mv, mf, th, e) = manufactured_sources(model, case, epsilon, grid, t)?;
            out.times.push(t);
            out.momentum.push(mv);
            out.f.push(mf);
            out.theta.push(th);
            out.e.push(e);
        }
        Ok(out)
    }

    fn weights(&self, t: f64) -> (usize, [f64; 4]) {
        let m = self.times.len() - 1;
        let j0 = ((t / self.step).floor() as isize - 1).clamp(0, m as isize - 3) as usize;
        let mut w = [1.0; 4];
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    w[a] *= (t - self.times[j0 + b]) / (self.times[j0 + a] - self.times[j0 + b]);
                }
            }
        }
        (j0, w)
    }
}

fn blend(fields: &[&[f64]; 4], w: &[f64; 4]) -> Vec<f64> {
    (0..fields[0].len())
        .map(|k| (0..4).map(|a| w[a] * fields[a][k]).sum())
        .collect()
}

impl Forcing for MmsForcing {
    fn sources(&self, t: f64, var: TemperatureVariable) -> Result<Sources> {
        let (j0, w) = self.weights(t);
        let grid = self.theta[0].grid;
        let mut mv = VectorField::zeros(grid);
        for c in 0..2 {
            mv.c[c] = blend(
                &std::array::from_fn(|a| self.momentum[j0 + a].c[c].as_slice()),
                &w,
            );
        }
        let mut mf = TensorField::zeros(grid);
        for c in 0..4 {
            mf.c[c] = blend(&std::array::from_fn(|a| self.f[j0 + a].c[c].as_slice()), &w);
        }
        let table = match var {
            TemperatureVariable::Theta => &self.theta,
            TemperatureVariable::InternalEnergy => &self.e,
        };
        let heat = blend(&std::array::from_fn(|a| table[j0 + a].data.as_slice()), &w);
        Ok(Sources {
            momentum: Some(mv),
            f: Some(mf),
            heat: Some(ScalarField { grid, data: heat }),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    /// First grid of the study.
    None,
    /// Both errors vanish.
    Exact,
    Observed(f64),
}

impl Order {
    fn between(coarse: f64, fine: f64) -> Order {
        if coarse == 0.0 && fine == 0.0 {
            Order::Exact
        } else {
            Order::Observed((coarse / fine).log2())
        }
    }

    /// Whether the order lies in `[lo, hi]`; exact reproduction always passes.
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        match *self {
            Order::Exact => true,
            Order::Observed(p) => p >= lo && p <= hi,
            Order::None => true,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::None => Ok(()),
            Order::Exact => write!(f, "exact"),
            Order::Observed(p) => write!(f, "{p:.6}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub err_v: f64,
    pub err_theta: f64,
    pub err_f: f64,
    pub order_v: Order,
    pub order_theta: Order,
    pub order_f: Order,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
}

impl StudyReport {
    pub const CSV_HEADER: &'static str = "n,err_v,err_theta,err_F,order_v,order_theta,order_F";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{},{},{}\n",
                r.n, r.err_v, r.err_theta, r.err_f, r.order_v, r.order_theta, r.order_f
            ));
        }
        s
    }

    /// Every observed order of `v` and `theta` in `[lo, hi]` and of `F` at least `f_min`.
    pub fn orders_within(&self, lo: f64, hi: f64, f_min: f64) -> bool {
        self.rows.iter().all(|r| {
            r.order_v.within(lo, hi)
                && r.order_theta.within(lo, hi)
                && r.order_f.within(f_min, f64::INFINITY)
        })
    }
}

/// Study parameters shared by every grid level.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySettings {
    pub epsilon: f64,
    pub t_end: f64,
    /// `dt = dt_coeff * h^2`, rounded down so that `T` is hit exactly.
    pub dt_coeff: f64,
    pub projection_tol: f64,
}

impl Default for StudySettings {
    fn default() -> Self {
        StudySettings {
            epsilon: 1e-3,
            t_end: 0.05,
            dt_coeff: 0.1,
            projection_tol: 1e-10,
        }
    }
}

fn l2_err(grid: Grid, a: &[&[f64]], b: &[&[f64]]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x
            .iter()
            .zip(y.iter())
            .map(|(p, q)| (p - q).powi(2))
            .sum::<f64>();
    }
    (s * grid.cell_area()).sqrt()
}

/// Runs one grid level and returns `(err_v, err_theta, err_F)` at `T`.
pub fn run_level(
    model: &MaterialModel,
    case: &ManufacturedCase,
    settings: &StudySettings,
    n: usize,
) -> Result<(f64, f64, f64)> {
    case.check()?;
    if model.regime != case.regime {
        return Err(Error::IncompatibleScenario(format!(
            "case regime {} but model regime {}",
            case.regime, model.regime
        )));
    }
    let grid = Grid::new(n, Boundary::Periodic)?;
    let steps = (settings.t_end / (settings.dt_coeff * grid.h * grid.h))
        .ceil()
        .max(1.0);
    let dt = settings.t_end / steps;
    let config = SolverConfig {
        epsilon: settings.epsilon,
        dt_policy: DtPolicy::Fixed(dt),
        projection_tol: settings.projection_tol,
        t_end: settings.t_end,
        ..SolverConfig::default()
    };
    let forcing = MmsForcing::new(model, case, settings.epsilon, grid, settings.t_end)?;
    let mut solver = Solver::new(model.clone(), config, grid)?.with_forcing(Box::new(forcing));
    let mut state = exact_solution(case, grid, 0.0);
    for _ in 0..steps as usize {
        state = solver.step_dt(&state, dt)?;
    }
    let ex = exact_solution(case, grid, settings.t_end);
    let ev = l2_err(
        grid,
        &[&state.v.c[0], &state.v.c[1]],
        &[&ex.v.c[0], &ex.v.c[1]],
    );
    let et = l2_err(grid, &[&state.theta.data], &[&ex.theta.data]);
    let fa: Vec<&[f64]> = state.f.c.iter().map(|c| c.as_slice()).collect();
    let fb: Vec<&[f64]> = ex.f.c.iter().map(|c| c.as_slice()).collect();
    let ef = l2_err(grid, &fa, &fb);
    Ok((ev, et, ef))
}

pub fn convergence_study(
    model: &MaterialModel,
    case: &ManufacturedCase,
    settings: &StudySettings,
    grids: &[usize],
) -> Result<StudyReport> {
    if grids.len() < 3 {
        return Err(Error::InvalidParameter {
            key: "mms.grids".into(),
            reason: "needs at least three grid sizes".into(),
        });
    }
    let mut rows: Vec<StudyRow> = Vec::new();
    for &n in grids {
        let (ev, et, ef) = run_level(model, case, settings, n)?;
        let (ov, ot, of) = match rows.last() {
            Some(p) => (
                Order::between(p.err_v, ev),
                Order::between(p.err_theta, et),
                Order::between(p.err_f, ef),
            ),
            None => (Order::None, Order::None, Order::None),
        };
        rows.push(StudyRow {
            n,
            err_v: ev,
            err_theta: et,
            err_f: ef,
            order_v: ov,
            order_theta: ot,
            order_f: of,
        });
    }
    Ok(StudyReport { rows })
}
