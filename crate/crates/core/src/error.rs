use thiserror::Error;

/// Errors raised by the polar-code library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("index {index} outside [1, {len}]")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("erasure probability {0} outside [0, 1]")]
    InvalidEpsilon(f64),

    #[error("duplicate index {0} in index set")]
    DuplicateIndex(usize),

    #[error("{0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
