use thiserror::Error;

/// Failures of carrier arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by a non-constant operand is not defined for integer carriers")]
    NonConstantDivisor,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("dimension mismatch: expected {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("pairwise-product function requires an even input length, got {0}")]
    OddLength(usize),
    #[error("input size must be at least 10, got {0}")]
    InputTooSmall(usize),
    #[error("payload must hold exactly 10 entries, got {0}")]
    PayloadLength(usize),
    #[error("value {0} cannot be decoded as a greeting character (expected 0..=127)")]
    NotAChar(i64),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
