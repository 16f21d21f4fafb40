use thiserror::Error;

use crate::spectral::SpectralReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("capacity exceeded: {what} (limit {limit})")]
    CapacityExceeded { what: String, limit: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("size limit: {what} has {size} elements, limit is {limit}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("zero vector has no Rayleigh quotient")]
    ZeroVector,

    #[error("vector is constant")]
    ConstantVector,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("map is not 1-Lipschitz on edge {{{u}, {v}}}: |f(u) - f(v)| = {gap}")]
    InvalidMap { u: usize, v: usize, gap: f64 },

    #[error("eigensolver did not converge after {} operator applications (residual {:.3e})", .best.iterations, .best.residual)]
    ConvergenceFailure { best: Box<SpectralReport> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
