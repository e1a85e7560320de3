//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent arguments (bad masks, mismatched sizes, ...).
    #[error("argument error: {0}")]
    Argument(String),
    /// Inputs outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Exact exponential sweeps refuse inputs above their size caps.
    #[error("size guard: {0}")]
    SizeGuard(String),
    /// Dense linear algebra failed (non-SPD matrix, singular solve, ...).
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Malformed table or result file.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn size_guard(msg: impl Into<String>) -> Self {
        Error::SizeGuard(msg.into())
    }
}
