//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the numeric kernels and optimizers.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix decomposition did not converge or the input was unsuitable
    /// (e.g. rank-deficient input to a polar projection).
    #[error("{op} failed on a {rows}x{cols} matrix")]
    DecompositionFailed {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    /// An input violated a documented precondition.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A computation produced a non-finite or otherwise unusable result.
    #[error("numeric failure: {0}")]
    NumericFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::NumericFailure(msg.into())
    }
}
