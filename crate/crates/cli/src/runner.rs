//! Drivers behind the subcommands.

use std::fmt::Write as _;
use std::path::Path;

use tvs_core::audit::{budget_record, entropy_production, positivity_check, Auditor, EnergyLedger};
use tvs_core::constitutive::validate_bounds;
use tvs_core::galerkin::{
    compare_to_fd, integrate_rk4, stable_dt, FdTrajectory, GalerkinBasis, GalerkinTrajectory,
    RunTag,
};
use tvs_core::mms::{convergence_study, exact_solution, MmsForcing};
use tvs_core::solver::init_theta_cutoff;
use tvs_core::{Boundary, Error, Grid, MaterialModel, Regime, Solver, SolverConfig, State};

use crate::config::{InitSpec, SimConfig};
use crate::output::{
    ensure_dir, snapshot_path, write_pgm, write_snapshot, write_text, BudgetWriter,
};
use crate::CliError;

/// Tolerance for the row-wise sign checks on accepted states.
const SIGN_TOL: f64 = 1e-12;

/// Whether a study met the thresholds declared in its config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    ThresholdMissed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub t_final: f64,
    pub budget_rows: usize,
    pub snapshots: usize,
    pub energy_drift: f64,
    pub energy_drift_raw: f64,
    pub max_entropy_residual: f64,
    pub max_kinetic_residual: f64,
    pub min_theta: f64,
    pub min_det_f: f64,
    pub min_production: f64,
}

impl RunSummary {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "steps = {}", self.steps);
        let _ = writeln!(s, "t_final = {:.16e}", self.t_final);
        let _ = writeln!(s, "budget_rows = {}", self.budget_rows);
        let _ = writeln!(s, "snapshots = {}", self.snapshots);
        let _ = writeln!(s, "energy_drift_booked = {:.6e}", self.energy_drift);
        let _ = writeln!(s, "energy_drift_raw = {:.6e}", self.energy_drift_raw);
        let _ = writeln!(
            s,
            "max_entropy_balance_residual = {:.6e}",
            self.max_entropy_residual
        );
        let _ = writeln!(
            s,
            "max_kinetic_energy_residual = {:.6e}",
            self.max_kinetic_residual
        );
        let _ = writeln!(s, "min_theta = {:.16e}", self.min_theta);
        let _ = writeln!(s, "min_detF = {:.16e}", self.min_det_f);
        let _ = writeln!(s, "min_pointwise_production = {:.6e}", self.min_production);
        s
    }
}

struct Initial {
    state: State,
    forcing: Option<MmsForcing>,
}

fn initial_state(cfg: &SimConfig, grid: Grid) -> Result<Initial, CliError> {
    match &cfg.init {
        InitSpec::Preset(p) => {
            let mut state = p.build(grid)?;
            state.theta = init_theta_cutoff(&state.theta, cfg.solver.r);
            Ok(Initial {
                state,
                forcing: None,
            })
        }
        InitSpec::Mms => {
            if grid.bc != Boundary::Periodic {
                return Err(Error::IncompatibleScenario(
                    "manufactured solutions need a periodic grid".into(),
                )
                .into());
            }
            let case = &cfg.mms.case;
            if case.regime != cfg.model.regime {
                return Err(Error::IncompatibleScenario(format!(
                    "mms case regime {} but material regime {}",
                    case.regime, cfg.model.regime
                ))
                .into());
            }
            let forcing =
                MmsForcing::new(&cfg.model, case, cfg.solver.epsilon, grid, cfg.solver.t_end)?;
            Ok(Initial {
                state: exact_solution(case, grid, 0.0),
                forcing: Some(forcing),
            })
        }
    }
}

/// Row-wise invariants every accepted state must satisfy.
fn check_row(state: &State, min_production: f64) -> Result<(), CliError> {
    let rep = positivity_check(state, None);
    if let Some(f) = rep.failure {
        return Err(Error::PositivityLost {
            field: f.field,
            i: f.i,
            j: f.j,
            value: f.value,
            t: state.t,
        }
        .into());
    }
    if min_production < -SIGN_TOL {
        return Err(CliError::Invariant(format!(
            "negative entropy production {min_production:e} at t = {}",
            state.t
        )));
    }
    Ok(())
}

/// Audits one accepted state and appends its budget row and snapshot.
fn emit(
    cfg: &SimConfig,
    out_dir: &Path,
    s: &State,
    summary: &mut RunSummary,
    budget: &mut BudgetWriter,
) -> Result<(), CliError> {
    let rec = budget_record(&cfg.model, s)?;
    let pmin = entropy_production(&cfg.model, s)?.min();
    summary.min_production = summary.min_production.min(pmin);
    summary.min_theta = summary.min_theta.min(rec.min_theta);
    summary.min_det_f = summary.min_det_f.min(rec.min_det_f);
    check_row(s, pmin)?;
    budget.push(&rec)?;
    if cfg.output.snapshots {
        write_snapshot(&snapshot_path(out_dir, summary.snapshots), s)?;
        summary.snapshots += 1;
    }
    Ok(())
}

/// Time-steps the configured scenario, writing budget rows, snapshots and a summary.
pub fn run_scenario(cfg: &SimConfig, out_dir: &Path) -> Result<RunSummary, CliError> {
    ensure_dir(out_dir)?;
    let grid = Grid::new(cfg.n, cfg.bc)?;
    let Initial { mut state, forcing } = initial_state(cfg, grid)?;
    let mut solver = Solver::new(cfg.model.clone(), cfg.solver.clone(), grid)?;
    if let Some(f) = forcing {
        solver = solver.with_forcing(Box::new(f));
    }
    solver.prepare(&mut state)?;

    let auditor = Auditor::new(cfg.model.clone(), &cfg.solver)?;
    let mut ledger = EnergyLedger::new(&auditor, &state)?;
    let mut budget = BudgetWriter::create(out_dir)?;
    let mut summary = RunSummary {
        steps: 0,
        t_final: state.t,
        budget_rows: 0,
        snapshots: 0,
        energy_drift: 0.0,
        energy_drift_raw: 0.0,
        max_entropy_residual: 0.0,
        max_kinetic_residual: 0.0,
        min_theta: f64::INFINITY,
        min_det_f: f64::INFINITY,
        min_production: f64::INFINITY,
    };
    let stride = cfg.output.stride;
    let t_end = cfg.solver.t_end;
    let mut last_written = 0;
    emit(cfg, out_dir, &state, &mut summary, &mut budget)?;
    while let Some(dt) = solver.next_dt(&state, t_end)? {
        let mut next = solver.step_dt(&state, dt)?;
        if (next.t - t_end).abs() < 1e-14 * t_end.max(1.0) {
            next.t = t_end;
        }
        summary.steps += 1;
        ledger.record(&auditor, &next)?;
        if summary.steps.is_multiple_of(stride) {
            let er = auditor.entropy_balance_residual(&state, &next, dt)?.abs();
            let kr = auditor.kinetic_energy_residual(&state, &next, dt).abs();
            summary.max_entropy_residual = summary.max_entropy_residual.max(er);
            summary.max_kinetic_residual = summary.max_kinetic_residual.max(kr);
            emit(cfg, out_dir, &next, &mut summary, &mut budget)?;
            last_written = summary.steps;
        }
        state = next;
    }
    if last_written != summary.steps {
        emit(cfg, out_dir, &state, &mut summary, &mut budget)?;
    }
    let fin = state;
    summary.budget_rows = budget.rows;
    budget.finish()?;
    summary.t_final = fin.t;
    summary.energy_drift = ledger.relative_drift();
    summary.energy_drift_raw = ledger.raw_relative_drift();
    if cfg.output.pgm {
        write_pgm(&out_dir.join("theta.pgm"), &fin)?;
    }
    write_text(&out_dir.join("summary.txt"), &summary.render())?;
    Ok(summary)
}

/// Manufactured-solution convergence study; writes `mms.csv`.
pub fn run_mms(cfg: &SimConfig, out_dir: &Path) -> Result<Verdict, CliError> {
    ensure_dir(out_dir)?;
    let m = &cfg.mms;
    let report = convergence_study(&cfg.model, &m.case, &m.settings, &m.grids)?;
    write_text(&out_dir.join("mms.csv"), &report.to_csv())?;
    print!("{}", report.to_csv());
    Ok(
        if report.orders_within(m.order_min, m.order_max, m.order_f_min) {
            Verdict::Pass
        } else {
            Verdict::ThresholdMissed
        },
    )
}

/// Spectral Galerkin reference against the finite-difference solver; writes `galerkin.csv`.
pub fn run_galerkin_compare(cfg: &SimConfig, out_dir: &Path) -> Result<Verdict, CliError> {
    let gs = &cfg.galerkin;
    let fd_model = if gs.fd_regime == cfg.model.regime {
        cfg.model.clone()
    } else {
        MaterialModel::preset(gs.fd_regime)
    };
    let eps = cfg.solver.epsilon;
    let gal_tag = RunTag {
        model: cfg.model.clone(),
        epsilon: eps,
        data: gs.data,
    };
    let fd_tag = RunTag {
        model: fd_model.clone(),
        epsilon: eps,
        data: gs.data,
    };
    if gal_tag != fd_tag {
        return Err(Error::IncompatibleScenario(format!(
            "Galerkin run uses regime {} but the finite-difference run uses {}",
            cfg.model.regime, gs.fd_regime
        ))
        .into());
    }
    if cfg.model.regime == Regime::P3 {
        return Err(Error::IncompatibleScenario(
            "the Galerkin reference supports regimes P1 and P2".into(),
        )
        .into());
    }
    ensure_dir(out_dir)?;

    let basis = GalerkinBasis::new(gs.n_flow, gs.m_temp)?;
    let c0 = gs.data.coefficients(&basis);
    let theta_max = 1.0 + 2.0 * gs.data.a_theta.abs();
    let dt = gs
        .dt
        .unwrap_or_else(|| stable_dt(&cfg.model, &basis, eps, theta_max));
    let coeffs = integrate_rk4(&cfg.model, &basis, eps, &c0, dt, gs.t_end)?;

    let grid = Grid::new(gs.fd_n, Boundary::Periodic)?;
    let mut state = gs.data.sample(grid);
    let solver_cfg = SolverConfig {
        t_end: gs.t_end,
        ..cfg.solver.clone()
    };
    let mut solver = Solver::new(fd_model, solver_cfg, grid)?;
    solver.prepare(&mut state)?;
    let first = state.clone();
    let last = solver.run(state, gs.t_end, |_| Ok(()))?;

    let report = compare_to_fd(
        &GalerkinTrajectory {
            tag: gal_tag,
            basis,
            states: coeffs,
        },
        &FdTrajectory {
            tag: fd_tag,
            states: vec![first, last],
        },
    )?;
    write_text(&out_dir.join("galerkin.csv"), &report.to_csv())?;
    print!("{}", report.to_csv());
    let ok = report
        .last()
        .is_some_and(|d| d.v <= gs.threshold && d.theta <= gs.threshold && d.f <= gs.threshold);
    Ok(if ok {
        Verdict::Pass
    } else {
        Verdict::ThresholdMissed
    })
}

/// Samples the material laws against the regime's named inequalities.
pub fn validate_material(cfg: &SimConfig) -> Verdict {
    let report = validate_bounds(&cfg.model, cfg.sample_max, cfg.samples);
    print!("{report}");
    if report.all_passed() {
        Verdict::Pass
    } else {
        Verdict::ThresholdMissed
    }
}
