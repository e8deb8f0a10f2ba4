use thiserror::Error;

use crate::format::FormatError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not an odd prime")]
    BadPrime(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("diagonal entry beta({0}, {0}) must be zero")]
    NotAlternating(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("partial assignment is not extendable: {0}")]
    BadPartial(String),

    #[error("not an embedding: {0}")]
    BadEmbedding(String),

    #[error("instance exceeds budget: {0}")]
    TooLarge(String),

    #[error("base is not contained in the ambient set: {0}")]
    BadBase(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("instance too small: {0}")]
    TooSmall(String),

    #[error(transparent)]
    Format(#[from] FormatError),
}

pub(crate) fn dim_mismatch(what: impl Into<String>) -> Error {
    Error::DimensionMismatch(what.into())
}
