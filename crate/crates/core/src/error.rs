use alloc::string::String;

/// Errors raised by the core computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Problem size beyond what the exact algorithms support.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Data failed an internal consistency check.
    #[error("inconsistent data: {0}")]
    Inconsistency(String),
    /// A closed-form eigenvalue has a negative radicand.
    #[error("negative radicand {radicand:e} in {formula}")]
    NegativeRadicand { formula: &'static str, radicand: f64 },
    /// A linear map expected to be invertible has a zero eigenvalue.
    #[error("zero eigenvalue in {formula} at alpha = {alpha}")]
    Degenerate { formula: &'static str, alpha: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn inconsistent(msg: impl Into<String>) -> Error {
    Error::Inconsistency(msg.into())
}
