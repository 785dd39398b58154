use thiserror::Error;

/// Errors raised by the oracles, the reduction and the command front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must have at least one entry")]
    EmptyVector,

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point lies outside the set (distance {distance:e} > tolerance {tolerance:e})")]
    NotInSet { distance: f64, tolerance: f64 },

    #[error("set has no exact linear minimization oracle")]
    LmoUnavailable,

    #[error("certificate violated: {0}")]
    CertificateViolation(String),

    #[error("cannot parse set spec: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;
