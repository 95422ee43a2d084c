//! Thermoviscoelastic Giesekus fluid simulator with thermodynamic audits.

// Negated comparisons reject NaN; indexed loops mirror the stencil formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod audit;
pub mod constitutive;
pub mod error;
pub mod galerkin;
pub mod grid;
pub mod mms;
pub mod projection;
pub mod quadrature;
pub mod scenario;
pub mod snapshot;
pub mod solver;
pub mod tensor2;

pub use constitutive::{Law, MaterialModel, Potentials, Regime, ValidationReport};
pub use error::{Error, PositivityField, Result};
pub use grid::{Boundary, Grid, Parity, ScalarField, TensorField, VectorField};
pub use solver::{
    DtPolicy, Forcing, Solver, SolverConfig, Sources, State, TemperaturePath, TemperatureVariable,
};
pub use tensor2::{Mat2, SymMat2};
