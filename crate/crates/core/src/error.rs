use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Unsupported type, rank, prime or other configuration input.
    #[error("configuration error: {0}")]
    Config(String),
    /// A precondition of an operation was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),
    /// The input lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Fixed-precision residue arithmetic ran out of room.
    #[error("precision exhausted: {0}")]
    Precision(String),
    /// Malformed textual or JSON input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! contract {
    ($($arg:tt)*) => { $crate::error::Error::Contract(format!($($arg)*)) };
}
macro_rules! config {
    ($($arg:tt)*) => { $crate::error::Error::Config(format!($($arg)*)) };
}
pub(crate) use config;
pub(crate) use contract;
