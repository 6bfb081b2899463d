//! Small dense linear-programming toolkit: problem construction, a two-phase
//! simplex solver that also returns dual multipliers, and a residual audit
//! that re-checks any solution against the original rows.

mod audit;
mod problem;
mod simplex;

pub use audit::{check_point, check_solution, DualResiduals, Residuals};
pub use problem::{Constraint, LinearProgram, Relation};
pub use simplex::{solve, solve_with, LpSolution, LpStatus, SolverOptions};

/// Feasibility tolerance applied to audited optimal solutions.
pub const TAU_LP: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("coefficient vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("simplex did not converge after {iterations} pivots (basis {basis:?})")]
    NumericalFailure { iterations: usize, basis: Vec<usize> },
}
