//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by the solvers and special-function evaluators.
#[derive(Debug, Error)]
pub enum HartreeError {
    /// An argument is outside the mathematical domain of the operation
    /// (non-positive Gamma argument, point outside the ball, unsupported
    /// mode index, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structurally invalid configuration (too few nodes, empty or
    /// duplicated sweep lists, missing output directory, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical routine failed to reach its target accuracy.
    #[error("numerical error: {context} (achieved {achieved:e}, wanted {wanted:e})")]
    Tolerance {
        context: String,
        achieved: f64,
        wanted: f64,
    },

    /// An iterative solver did not converge within its iteration budget.
    #[error("iteration limit ({iters}) reached: {context}, last residual {residual:e}")]
    NoConvergence {
        context: String,
        iters: usize,
        residual: f64,
    },

    /// A matrix factorization or linear solve failed (singular or
    /// indefinite operator where a definite one is required).
    #[error("linear algebra failure: {0}")]
    Linalg(String),

    /// An eigenvalue sits inside the ambiguity band around 1, so the Morse
    /// index cannot be certified at the working precision.
    #[error("ambiguous eigenvalue {value} within {band:e} of 1")]
    AmbiguousEigenvalue { value: f64, band: f64 },

    /// Input data is degenerate (identically zero profile, empty field, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Filesystem / serialization problems in the reporting layer.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, HartreeError>;
