use thiserror::Error;

/// Errors raised by the engine. Mathematical check failures are never
/// errors; they are reported through [`crate::report::CheckReport`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid tensor slot {slot} for rank {rank}")]
    InvalidSlot { slot: usize, rank: usize },

    #[error("variables must be distinct, got `{0}` twice")]
    VariableCollision(String),

    #[error("variable `{0}` does not occur in the series")]
    UnknownVariable(String),

    #[error("window error: {0}")]
    Window(String),

    #[error("product is not well defined: {0}")]
    IllDefinedProduct(String),

    #[error("invalid scalar `{0}`")]
    InvalidScalar(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
