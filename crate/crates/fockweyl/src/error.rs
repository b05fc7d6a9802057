use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation too large: total dimension {dim} exceeds cap {cap}")]
    TruncationTooLarge { dim: u128, cap: u128 },
    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("guard violation: {0}")]
    Guard(String),
    #[error("step too large: {0}")]
    StepTooLarge(String),
    #[error("not hermitian: {0}")]
    NotHermitian(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
