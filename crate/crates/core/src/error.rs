use thiserror::Error;

#[derive(Debug, Error)]
pub enum OrbitopeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    EigenNoConvergence { sweeps: usize, residual: f64 },

    #[error("exact expansion needs {terms} terms (budget {budget}); use the Monte Carlo path")]
    ExpansionBudget { terms: u128, budget: u128 },

    #[error("ambiguous eigenvalue clustering at tolerance {tol:e}; spectrum: {spectrum:?}")]
    AmbiguousClusters { tol: f64, spectrum: Vec<f64> },

    #[error("orbit does not span its ambient hull: {0}")]
    DegenerateOrbit(String),

    #[error("size guard exceeded: {0}")]
    Budget(String),

    #[error("unsupported dimension n = {0} (sphere grids exist for n in 2..=4)")]
    UnsupportedDimension(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, OrbitopeError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(OrbitopeError::InvalidArgument(msg.into()))
}
