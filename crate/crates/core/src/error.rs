//! Error types shared across the engine.

use thiserror::Error;

/// Engine-wide error type.
///
/// `Validation` covers bad user input (malformed permutations, out-of-range
/// degrees, unparsable text). `Internal` marks a broken mathematical
/// invariant, e.g. a negative Schubert structure constant; callers should
/// treat it as a bug, not a usage error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("internal invariant violation: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 1,
            Error::Internal(_) | Error::Io(_) => 2,
        }
    }
}
