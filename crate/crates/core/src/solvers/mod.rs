//! Linear solvers: conjugate gradients on banded matrices, banded Cholesky,
//! the zero-mean Neumann solve and the preconditioned pressure iteration.

mod cg;
mod cholesky;
mod neumann;
mod pressure;

pub use cg::{cghs_scaled, cghs_solve, conjugate_gradient, symmetric_scale, CgReport, StopRule};
pub use cholesky::CholeskyFactor;
pub use neumann::NeumannSolver;
pub use pressure::{pressure_operator, pressure_pcg, PressureReport, PressureSolver};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("Neumann data incompatible: sum {sum:e} exceeds tolerance {tol:e}")]
    Incompatible { sum: f64, tol: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
