use thiserror::Error;

/// Errors raised by state construction, channels and measures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: expected a power of two between 2 and 64")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("{what} index {index} out of range")]
    IndexOutOfRange { what: &'static str, index: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("trace is not one (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("Bloch vector norm {0} exceeds one")]
    InvalidBloch(f64),

    #[error("parameter {name} = {value} is out of range")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("qubit count {0} is not supported here ({1})")]
    QubitCount(usize, &'static str),

    #[error("optimizer did not converge after {restarts} restarts (best value {best_value})")]
    NotConverged { best_value: f64, restarts: usize },

    #[error("unknown {what}: {value}")]
    Unknown { what: &'static str, value: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
