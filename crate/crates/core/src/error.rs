use thiserror::Error;

/// Errors surfaced by model construction, solvers, and experiment plumbing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is singular or not positive definite: {0}")]
    Singular(String),

    #[error("fixed point did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    #[error("unknown preset `{0}` (expected fig1, fig2, fig3, or fig4)")]
    UnknownPreset(String),

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
