use thiserror::Error;

/// Errors raised by the inference toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs are individually valid but inconsistent with each other
    /// (dimension mismatch, mismatched support, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The mechanism cannot be applied because its sensitivity is unbounded.
    #[error("cannot privatize unbounded statistic: {0}")]
    UnboundedSensitivity(String),

    /// Numerical integration failed to reach the requested tolerance.
    #[error("quadrature failure: {0}")]
    Quadrature(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
