use thiserror::Error;

/// Which field lost positivity in a time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityField {
    Temperature,
    DetF,
}

impl std::fmt::Display for PositivityField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PositivityField::Temperature => write!(f, "theta"),
            PositivityField::DetF => write!(f, "det F"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite (b11 = {b11}, det = {det})")]
    NotPositiveDefinite { b11: f64, det: f64 },

    #[error("non-positive temperature {0}")]
    NonPositiveTemperature(f64),

    #[error("quadrature did not reach tolerance {tol} within {max_depth} refinement levels")]
    QuadratureFailure { tol: f64, max_depth: u32 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field size mismatch: expected {expected} values, got {got}")]
    FieldSize { expected: usize, got: usize },

    #[error("pressure Poisson solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    PoissonNoConvergence { iterations: usize, residual: f64 },

    #[error("internal energy {e} is out of range for this conformation (infimum {infimum})")]
    OutOfRange { e: f64, infimum: f64 },

    #[error("positivity lost: {field} = {value:e} at cell ({i}, {j}), t = {t}")]
    PositivityLost {
        field: PositivityField,
        i: usize,
        j: usize,
        value: f64,
        t: f64,
    },

    #[error("fixed dt = {dt:e} exceeds twice the stability bound {bound:e}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("Galerkin coefficient blow-up at t = {t} (|coefficient| = {value:e})")]
    BlowupDetected { t: f64, value: f64 },

    #[error("incompatible scenarios: {0}")]
    IncompatibleScenario(String),

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("config error at line {line}, key `{key}`: {reason}")]
    ConfigParse {
        line: usize,
        key: String,
        reason: String,
    },

    #[error("snapshot format error: {0}")]
    Snapshot(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
