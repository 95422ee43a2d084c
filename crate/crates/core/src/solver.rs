//! Explicit Heun time stepping of the regularized system.
//!
//! Momentum uses the skew-symmetric advection form and the wide-stencil
//! stress divergence, whose adjoint is exactly the heating term
//! `S : grad_h v`; together with the flux-form energy transport this makes
//! the internal-energy path conserve total energy in the semi-discrete sense.

use crate::constitutive::{elastic_energy_f, internal_energy_with_f, MaterialModel, Regime};
use crate::error::{Error, PositivityField, Result};
use crate::grid::{
    div_tensor, div_with, laplacian_tensor, velocity_gradient, Grid, Parity, ScalarField,
    TensorField, VectorField,
};
use crate::projection::{PoissonMethod, Projector, DEFAULT_TOL};
use crate::tensor2::bb_from_f;

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub v: VectorField,
    pub f: TensorField,
    pub theta: ScalarField,
    pub p: ScalarField,
    pub t: f64,
}

impl State {
    /// `v = 0`, `F = I`, uniform temperature.
    pub fn stationary(grid: Grid, theta: f64) -> Self {
        State {
            v: VectorField::zeros(grid),
            f: TensorField::identity(grid),
            theta: ScalarField::constant(grid, theta),
            p: ScalarField::zeros(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> Grid {
        self.theta.grid
    }

    /// First cell where `theta <= 0` or `det F <= 0`, if any.
    pub fn first_positivity_violation(&self) -> Option<(PositivityField, usize, f64)> {
        for (k, &th) in self.theta.data.iter().enumerate() {
            if !(th > 0.0) {
                return Some((PositivityField::Temperature, k, th));
            }
        }
        for k in 0..self.grid().len() {
            let d = self.f.at(k).det();
            if !(d > 0.0) {
                return Some((PositivityField::DetF, k, d));
            }
        }
        None
    }

    fn positivity_error(&self) -> Result<()> {
        match self.first_positivity_violation() {
            None => Ok(()),
            Some((field, k, value)) => {
                let n = self.grid().n;
                Err(Error::PositivityLost {
                    field,
                    i: k % n,
                    j: k / n,
                    value,
                    t: self.t,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    Cfl { safety: f64 },
}

/// Which temperature variable the integrator advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemperaturePath {
    /// Temperature for P1, internal energy for P2 and P3.
    Auto,
    DirectTheta,
    InternalEnergy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub r: f64,
    pub dt_policy: DtPolicy,
    pub projection_tol: f64,
    pub t_end: f64,
    pub temperature_path: TemperaturePath,
    pub poisson: PoissonMethod,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-3,
            r: 0.1,
            dt_policy: DtPolicy::Cfl { safety: 0.4 },
            projection_tol: DEFAULT_TOL,
            t_end: 0.1,
            temperature_path: TemperaturePath::Auto,
            poisson: PoissonMethod::Auto,
        }
    }
}

fn invalid(key: &str, reason: String) -> Error {
    Error::InvalidParameter {
        key: key.into(),
        reason,
    }
}

impl SolverConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(invalid(
                "solver.epsilon",
                format!("must lie in [0, 1), got {}", self.epsilon),
            ));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(invalid(
                "solver.r",
                format!("must lie in (0, 1), got {}", self.r),
            ));
        }
        match self.dt_policy {
            DtPolicy::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => {
                return Err(invalid(
                    "solver.dt.value",
                    format!("must be positive, got {dt}"),
                ))
            }
            DtPolicy::Cfl { safety } if !(safety > 0.0 && safety < 1.0) => {
                return Err(invalid(
                    "solver.dt.safety",
                    format!("must lie in (0, 1), got {safety}"),
                ))
            }
            _ => {}
        }
        if !(self.projection_tol > 0.0) {
            return Err(invalid(
                "solver.projection_tol",
                format!("must be positive, got {}", self.projection_tol),
            ));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid(
                "solver.T",
                format!("must be nonnegative, got {}", self.t_end),
            ));
        }
        Ok(())
    }

    pub fn resolved_path(&self, regime: Regime) -> Result<TemperatureVariable> {
        match (self.temperature_path, regime) {
            (TemperaturePath::Auto, Regime::P1) | (TemperaturePath::DirectTheta, Regime::P1) => {
                Ok(TemperatureVariable::Theta)
            }
            (TemperaturePath::DirectTheta, Regime::P2) => Ok(TemperatureVariable::Theta),
            (TemperaturePath::DirectTheta, Regime::P3) => Err(invalid(
                "solver.temperature_path",
                "direct temperature evolution is only available for P1 and P2".into(),
            )),
            _ => Ok(TemperatureVariable::InternalEnergy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemperatureVariable {
    Theta,
    InternalEnergy,
}

/// Additive source terms for each evolved equation.
#[derive(Debug, Clone, Default)]
pub struct Sources {
    pub momentum: Option<VectorField>,
    pub f: Option<TensorField>,
    /// Added to the right side of whichever temperature variable is evolved.
    pub heat: Option<ScalarField>,
}

pub trait Forcing {
    fn sources(&self, t: f64, var: TemperatureVariable) -> Result<Sources>;
}

pub struct NoForcing;

impl Forcing for NoForcing {
    fn sources(&self, _t: f64, _var: TemperatureVariable) -> Result<Sources> {
        Ok(Sources::default())
    }
}

/// `2 nu(theta) Dv + 2 g(theta) F F^T`, stored as a full tensor.
pub fn deviatoric_stress(model: &MaterialModel, state: &State) -> TensorField {
    let l = velocity_gradient(&state.v);
    stress_from(model, state, &l)
}

fn stress_from(model: &MaterialModel, state: &State, l: &TensorField) -> TensorField {
    let g = state.grid();
    let mut s = TensorField::zeros(g);
    for k in 0..g.len() {
        let th = state.theta.data[k];
        let d = l.at(k).sym();
        let b = bb_from_f(&state.f.at(k));
        let two_nu = 2.0 * model.nu.value(th);
        let two_g = 2.0 * model.g.value(th);
        let sym = d.scale(two_nu) + b.scale(two_g);
        s.set(k, sym.to_mat());
    }
    s
}

/// Right side of the deformation-gradient equation:
/// `-div(F (x) v) + grad v F - delta/2 (F F^T F - F) + eps Lap F`.
pub fn rhs_f(model: &MaterialModel, state: &State, epsilon: f64) -> TensorField {
    let l = velocity_gradient(&state.v);
    rhs_f_with(model, state, epsilon, &l)
}

fn rhs_f_with(model: &MaterialModel, state: &State, epsilon: f64, l: &TensorField) -> TensorField {
    let g = state.grid();
    let adv = f_advection(&state.f, &state.v);
    let lap = if epsilon != 0.0 {
        Some(laplacian_tensor(&state.f))
    } else {
        None
    };
    let mut out = TensorField::zeros(g);
    for k in 0..g.len() {
        let f = state.f.at(k);
        let delta = model.delta.value(state.theta.data[k]);
        let relax = (bb_from_f(&f).to_mat() * f - f).scale(0.5 * delta);
        let mut r = l.at(k) * f - relax - adv.at(k);
        if let Some(lap) = &lap {
            r = r + lap.at(k).scale(epsilon);
        }
        out.set(k, r);
    }
    out
}

/// Component-wise `div(F_ab v)`; the product of an even and an odd field is odd.
pub fn f_advection(f: &TensorField, v: &VectorField) -> TensorField {
    let g = f.grid;
    let mut out = TensorField::zeros(g);
    for a in 0..4 {
        let flux = VectorField {
            grid: g,
            c: [
                f.c[a].iter().zip(&v.c[0]).map(|(x, y)| x * y).collect(),
                f.c[a].iter().zip(&v.c[1]).map(|(x, y)| x * y).collect(),
            ],
        };
        out.c[a] = div_with(&flux, Parity::Odd).data;
    }
    out
}

/// Skew-symmetric advection `1/2 [div(v (x) v) + (v . grad) v]`.
pub fn momentum_advection(v: &VectorField) -> VectorField {
    let g = v.grid;
    let mut out = VectorField::zeros(g);
    for a in 0..2 {
        let flux = VectorField {
            grid: g,
            c: [
                v.c[a].iter().zip(&v.c[0]).map(|(x, y)| x * y).collect(),
                v.c[a].iter().zip(&v.c[1]).map(|(x, y)| x * y).collect(),
            ],
        };
        let conservative = div_with(&flux, Parity::Even).data;
        let ddx = g.dx(&v.c[a], Parity::Odd);
        let ddy = g.dy(&v.c[a], Parity::Odd);
        for k in 0..g.len() {
            out.c[a][k] = 0.5 * (conservative[k] + v.c[0][k] * ddx[k] + v.c[1][k] * ddy[k]);
        }
    }
    out
}

fn check_theta_field(theta: &ScalarField) -> Result<()> {
    for &th in &theta.data {
        if !(th > 0.0) {
            return Err(Error::NonPositiveTemperature(th));
        }
    }
    Ok(())
}

/// Temperature right side, dispatched on the regime: the temperature
/// equation for P1, the internal-energy equation for P2 and P3.
pub fn rhs_theta(model: &MaterialModel, state: &State) -> Result<ScalarField> {
    let var = match model.regime {
        Regime::P1 => TemperatureVariable::Theta,
        _ => TemperatureVariable::InternalEnergy,
    };
    let l = velocity_gradient(&state.v);
    temperature_rhs(model, state, &l, var)
}

fn temperature_rhs(
    model: &MaterialModel,
    state: &State,
    l: &TensorField,
    var: TemperatureVariable,
) -> Result<ScalarField> {
    check_theta_field(&state.theta)?;
    let g = state.grid();
    let theta = &state.theta.data;
    let kappa: Vec<f64> = theta.iter().map(|&t| model.kappa.value(t)).collect();
    let conduction = g.div_flux(theta, &kappa);
    let mut out = vec![0.0; g.len()];
    match var {
        TemperatureVariable::Theta => {
            let transport = transport_div(&state.theta.data, &state.v);
            let inv_cv = 1.0 / model.c_v;
            let elastic_fixed = model.regime != Regime::P2;
            for k in 0..g.len() {
                let th = theta[k];
                let d = l.at(k).sym();
                let mut heat = conduction[k] + 2.0 * model.nu.value(th) * d.norm_sq();
                if elastic_fixed {
                    let bmi = bb_from_f(&state.f.at(k)).minus_identity();
                    heat += model.g.value(th) * model.delta.value(th) * bmi.norm_sq();
                } else {
                    // e = c_v theta: the elastic stress power is the only elastic heating.
                    let b = bb_from_f(&state.f.at(k));
                    heat += 2.0 * model.g.value(th) * b.inner(&l.at(k));
                }
                out[k] = -transport[k] + inv_cv * heat;
            }
        }
        TemperatureVariable::InternalEnergy => {
            let e = internal_energy_field(model, state)?;
            let transport = transport_div(&e, &state.v);
            let stress = stress_from(model, state, l);
            for k in 0..g.len() {
                let work = crate::tensor2::frob_inner(&stress.at(k), &l.at(k));
                out[k] = -transport[k] + conduction[k] + work;
            }
        }
    }
    Ok(ScalarField { grid: g, data: out })
}

/// `div(u v)` for an even scalar `u` and the velocity `v`.
pub(crate) fn transport_div(u: &[f64], v: &VectorField) -> Vec<f64> {
    let g = v.grid;
    let flux = VectorField {
        grid: g,
        c: [
            u.iter().zip(&v.c[0]).map(|(x, y)| x * y).collect(),
            u.iter().zip(&v.c[1]).map(|(x, y)| x * y).collect(),
        ],
    };
    div_with(&flux, Parity::Odd).data
}

pub fn internal_energy_field(model: &MaterialModel, state: &State) -> Result<Vec<f64>> {
    let g = state.grid();
    let mut e = Vec::with_capacity(g.len());
    for k in 0..g.len() {
        let th = state.theta.data[k];
        if !(th > 0.0) {
            return Err(Error::NonPositiveTemperature(th));
        }
        let f = elastic_energy_f(&bb_from_f(&state.f.at(k)))?;
        e.push(internal_energy_with_f(model, th, f));
    }
    Ok(e)
}

const INVERT_REL_TOL: f64 = 1e-12;

/// Solves `e(theta, B) = e_val` for `theta > 0`.
pub fn invert_internal_energy(
    model: &MaterialModel,
    e_val: f64,
    b: &crate::tensor2::SymMat2,
) -> Result<f64> {
    let f = elastic_energy_f(b)?;
    invert_with_f(model, e_val, f, e_val / model.c_v)
}

pub(crate) fn invert_with_f(model: &MaterialModel, e_val: f64, f: f64, guess: f64) -> Result<f64> {
    let e_of = |th: f64| internal_energy_with_f(model, th, f);
    let de_of = |th: f64| model.c_v - th * model.g.d2(th) * f;
    let infimum = e_of(0.0);
    if !(e_val > infimum) || !e_val.is_finite() {
        return Err(Error::OutOfRange { e: e_val, infimum });
    }
    let mut lo = 0.0;
    let mut hi = if guess > 0.0 && guess.is_finite() {
        guess
    } else {
        1.0
    };
    let mut grow = 0;
    while e_of(hi) < e_val {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 2000 || !hi.is_finite() {
            return Err(Error::OutOfRange { e: e_val, infimum });
        }
    }
    let mut th = if guess > lo && guess <= hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..200 {
        let r = e_of(th) - e_val;
        if r == 0.0 {
            return Ok(th);
        }
        if r > 0.0 {
            hi = hi.min(th);
        } else {
            lo = lo.max(th);
        }
        let d = de_of(th);
        let mut next = th - r / d;
        if !(d > 0.0) || !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - th).abs();
        th = next;
        if step <= 0.25 * INVERT_REL_TOL * th || hi - lo <= 0.25 * INVERT_REL_TOL * th {
            return Ok(th);
        }
    }
    Ok(th)
}

/// Keeps `theta0` where `r <= theta0 <= 1/r`, replacing it by 1 elsewhere.
pub fn init_theta_cutoff(theta0: &ScalarField, r: f64) -> ScalarField {
    let data = theta0
        .data
        .iter()
        .map(|&t| if t >= r && t <= 1.0 / r { t } else { 1.0 })
        .collect();
    ScalarField {
        grid: theta0.grid,
        data,
    }
}

/// `safety * min(h / (|v|_max + 1e-8), h^2 / (4 max(nu_max, kappa_max / c_v, eps)))`.
pub fn cfl_dt(model: &MaterialModel, config: &SolverConfig, state: &State) -> f64 {
    let safety = match config.dt_policy {
        DtPolicy::Cfl { safety } => safety,
        DtPolicy::Fixed(_) => 1.0,
    };
    cfl_bound(model, config.epsilon, state) * safety
}

fn cfl_bound(model: &MaterialModel, epsilon: f64, state: &State) -> f64 {
    let h = state.grid().h;
    let vmax = state.v.max_norm();
    let mut diff = epsilon;
    for &th in &state.theta.data {
        diff = diff
            .max(model.nu.value(th))
            .max(model.kappa.value(th) / model.c_v);
    }
    let adv = h / (vmax + 1e-8);
    let dif = h * h / (4.0 * diff);
    adv.min(dif)
}

struct Rates {
    v: VectorField,
    f: TensorField,
    temp: Vec<f64>,
}

/// Time integrator owning the projection workspace.
pub struct Solver {
    pub model: MaterialModel,
    pub config: SolverConfig,
    projector: Projector,
    var: TemperatureVariable,
    forcing: Box<dyn Forcing>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver")
            .field("model", &self.model)
            .field("config", &self.config)
            .finish()
    }
}

impl Solver {
    pub fn new(model: MaterialModel, config: SolverConfig, grid: Grid) -> Result<Self> {
        model.check()?;
        config.check()?;
        let var = config.resolved_path(model.regime)?;
        let projector = Projector::new(grid, config.poisson)?;
        Ok(Solver {
            model,
            config,
            projector,
            var,
            forcing: Box::new(NoForcing),
        })
    }

    pub fn with_forcing(mut self, forcing: Box<dyn Forcing>) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn temperature_variable(&self) -> TemperatureVariable {
        self.var
    }

    pub fn grid(&self) -> Grid {
        self.projector.grid()
    }

    /// Step size the policy selects for this state, without end-time clipping.
    pub fn dt_for(&self, state: &State) -> Result<f64> {
        match self.config.dt_policy {
            DtPolicy::Cfl { .. } => Ok(cfl_dt(&self.model, &self.config, state)),
            DtPolicy::Fixed(dt) => {
                let bound = cfl_bound(&self.model, self.config.epsilon, state);
                if dt > 2.0 * bound {
                    Err(Error::CflViolation { dt, bound })
                } else {
                    Ok(dt)
                }
            }
        }
    }

    /// One step using the policy's step size.
    pub fn step(&mut self, state: &State) -> Result<State> {
        let dt = self.dt_for(state)?;
        self.step_dt(state, dt)
    }

    /// Projects an initial velocity and fills the pressure with zeros.
    pub fn prepare(&mut self, state: &mut State) -> Result<()> {
        let (v, _) = self
            .projector
            .project(&state.v, self.config.projection_tol)?;
        state.v = v;
        state.positivity_error()
    }

    fn rates(&self, state: &State) -> Result<Rates> {
        let l = velocity_gradient(&state.v);
        let stress = stress_from(&self.model, state, &l);
        let mut rv = div_tensor(&stress, Parity::Even);
        let adv = momentum_advection(&state.v);
        for a in 0..2 {
            for (r, x) in rv.c[a].iter_mut().zip(&adv.c[a]) {
                *r -= x;
            }
        }
        let mut rf = rhs_f_with(&self.model, state, self.config.epsilon, &l);
        let mut rt = temperature_rhs(&self.model, state, &l, self.var)?.data;
        let src = self.forcing.sources(state.t, self.var)?;
        if let Some(m) = src.momentum {
            for a in 0..2 {
                for (r, x) in rv.c[a].iter_mut().zip(&m.c[a]) {
                    *r += x;
                }
            }
        }
        if let Some(sf) = src.f {
            for a in 0..4 {
                for (r, x) in rf.c[a].iter_mut().zip(&sf.c[a]) {
                    *r += x;
                }
            }
        }
        if let Some(h) = src.heat {
            for (r, x) in rt.iter_mut().zip(&h.data) {
                *r += x;
            }
        }
        Ok(Rates {
            v: rv,
            f: rf,
            temp: rt,
        })
    }

    fn temp_variable_of(&self, state: &State) -> Result<Vec<f64>> {
        match self.var {
            TemperatureVariable::Theta => Ok(state.theta.data.clone()),
            TemperatureVariable::InternalEnergy => internal_energy_field(&self.model, state),
        }
    }

    fn recover_theta(
        &self,
        temp: &[f64],
        f: &TensorField,
        guess: &ScalarField,
    ) -> Result<ScalarField> {
        let g = f.grid;
        match self.var {
            TemperatureVariable::Theta => Ok(ScalarField {
                grid: g,
                data: temp.to_vec(),
            }),
            TemperatureVariable::InternalEnergy => {
                let mut data = Vec::with_capacity(g.len());
                for k in 0..g.len() {
                    let fk = f.at(k);
                    if !(fk.det() > 0.0) {
                        return Err(Error::PositivityLost {
                            field: PositivityField::DetF,
                            i: k % g.n,
                            j: k / g.n,
                            value: fk.det(),
                            t: f64::NAN,
                        });
                    }
                    let fb = elastic_energy_f(&bb_from_f(&fk))?;
                    data.push(invert_with_f(&self.model, temp[k], fb, guess.data[k])?);
                }
                Ok(ScalarField { grid: g, data })
            }
        }
    }

    /// One Heun step of size `dt`.
    pub fn step_dt(&mut self, s0: &State, dt: f64) -> Result<State> {
        let tol = self.config.projection_tol;
        let t0 = self.temp_variable_of(s0)?;
        let r0 = self.rates(s0)?;

        let mut v1 = s0.v.clone();
        axpy_vec(&mut v1, dt, &r0.v);
        let (v1, phi1) = self.projector.project(&v1, tol)?;
        let mut f1 = s0.f.clone();
        axpy_tensor(&mut f1, dt, &r0.f);
        let temp1: Vec<f64> = t0.iter().zip(&r0.temp).map(|(a, b)| a + dt * b).collect();
        let theta1 = self
            .recover_theta(&temp1, &f1, &s0.theta)
            .map_err(|e| stamp(e, s0.t + dt))?;
        let s1 = State {
            v: v1,
            f: f1,
            theta: theta1,
            p: ScalarField::zeros(s0.grid()),
            t: s0.t + dt,
        };
        s1.positivity_error()?;

        let r1 = self.rates(&s1)?;
        let mut v2 = s1.v.clone();
        axpy_vec(&mut v2, dt, &r1.v);
        let (v2, phi2) = self.projector.project(&v2, tol)?;

        let g = s0.grid();
        let mut v = VectorField::zeros(g);
        for a in 0..2 {
            for k in 0..g.len() {
                v.c[a][k] = 0.5 * (s0.v.c[a][k] + v2.c[a][k]);
            }
        }
        let mut f = s0.f.clone();
        for a in 0..4 {
            for k in 0..g.len() {
                f.c[a][k] += 0.5 * dt * (r0.f.c[a][k] + r1.f.c[a][k]);
            }
        }
        let temp: Vec<f64> = (0..g.len())
            .map(|k| t0[k] + 0.5 * dt * (r0.temp[k] + r1.temp[k]))
            .collect();
        let theta = self
            .recover_theta(&temp, &f, &s1.theta)
            .map_err(|e| stamp(e, s0.t + dt))?;
        let p = ScalarField {
            grid: g,
            data: phi1
                .data
                .iter()
                .zip(&phi2.data)
                .map(|(a, b)| 0.5 * (a + b) / dt)
                .collect(),
        };
        let out = State {
            v,
            f,
            theta,
            p,
            t: s0.t + dt,
        };
        out.positivity_error()?;
        Ok(out)
    }

    /// Advances to `t_end`, calling `observe` on the initial state and after every step.
    pub fn run<O>(&mut self, mut state: State, t_end: f64, mut observe: O) -> Result<State>
    where
        O: FnMut(&State) -> Result<()>,
    {
        observe(&state)?;
        while let Some(dt) = self.next_dt(&state, t_end)? {
            state = self.step_dt(&state, dt)?;
            if (state.t - t_end).abs() < 1e-14 * t_end.max(1.0) {
                state.t = t_end;
            }
            observe(&state)?;
        }
        Ok(state)
    }

    /// Step size towards `t_end`, shortened to land on it; `None` once reached.
    pub fn next_dt(&self, state: &State, t_end: f64) -> Result<Option<f64>> {
        if state.t >= t_end * (1.0 - 1e-14) {
            return Ok(None);
        }
        let dt = self.dt_for(state)?;
        let remaining = t_end - state.t;
        if dt >= remaining || remaining - dt < 1e-6 * dt {
            Ok(Some(remaining))
        } else {
            Ok(Some(dt))
        }
    }
}

fn stamp(e: Error, t: f64) -> Error {
    match e {
        Error::PositivityLost {
            field, i, j, value, ..
        } => Error::PositivityLost {
            field,
            i,
            j,
            value,
            t,
        },
        other => other,
    }
}

fn axpy_vec(y: &mut VectorField, a: f64, x: &VectorField) {
    for c in 0..2 {
        for (p, q) in y.c[c].iter_mut().zip(&x.c[c]) {
            *p += a * q;
        }
    }
}

fn axpy_tensor(y: &mut TensorField, a: f64, x: &TensorField) {
    for c in 0..4 {
        for (p, q) in y.c[c].iter_mut().zip(&x.c[c]) {
            *p += a * q;
        }
    }
}

/// One step with a freshly built solver (no forcing).
pub fn step(model: &MaterialModel, config: &SolverConfig, state: &State) -> Result<State> {
    Solver::new(model.clone(), config.clone(), state.grid())?.step(state)
}
