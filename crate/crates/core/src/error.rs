use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("value is not a p-adic integer (valuation {valuation})")]
    NotInZp { valuation: i64 },

    #[error("insufficient precision: need absolute precision {needed}, have {available}")]
    InsufficientPrecision { needed: i64, available: i64 },

    #[error("no integer solution within the ansatz: {0}")]
    UnsolvableAnsatz(String),

    #[error("resolution overflow: {0}")]
    ResolutionOverflow(String),

    #[error("outside domain: {0}")]
    OutsideDomain(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
