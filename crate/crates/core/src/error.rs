use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("iterates diverged (non-finite values); last finite epoch {last_finite_epoch}")]
    Diverged { last_finite_epoch: usize },

    #[error("bisection did not converge after {iterations} iterations (residual {residual:e})")]
    Bisection { iterations: usize, residual: f64 },

    #[error("reference solution reached residual {achieved:e}, target {target:e}")]
    ReferenceQuality { achieved: f64, target: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
