use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An object failed a structural or numerical validity check.
    #[error("validation error: {0}")]
    Validation(String),
    /// The request exceeds a configured resource limit.
    #[error("resource error: {0}")]
    Resource(String),
    /// Malformed text input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    /// A randomized procedure exhausted its retry budget.
    #[error("algorithm failure: {0}")]
    Failure(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
