//! Solver error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("shape mismatch: expected {expected} cells, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("unknown tableau {name:?}; available: {available}")]
    UnknownTableau { name: String, available: String },

    #[error("malformed tableau: {0}")]
    MalformedTableau(String),

    #[error(
        "elliptic solve did not converge after {iterations} iterations \
         (relative residual {relative_residual:.3e})"
    )]
    EllipticNoConvergence {
        iterations: usize,
        relative_residual: f64,
    },

    #[error("density positivity lost at stage {stage}, t = {time:.6e}: min rho = {min_rho:.6e}")]
    PositivityLoss {
        stage: usize,
        time: f64,
        min_rho: f64,
    },

    #[error("non-positive density {0:.6e} passed to the equation of state")]
    NonPositiveDensity(f64),
}

pub type Result<T> = std::result::Result<T, SolverError>;
