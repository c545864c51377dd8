use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum GewError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("outside the construction's domain: {0}")]
    Domain(String),

    #[error("no bracketing interval: {0}")]
    NoBracketing(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GewError>;
