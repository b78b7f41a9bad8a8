use thiserror::Error;

/// Errors produced by the region, solver and simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model or scenario description is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// The concave solver could not continue.
    #[error("solver error at iteration {iteration}: {message}")]
    Solver { iteration: usize, message: String },

    /// A simulation failed while running.
    #[error("runtime error: {0}")]
    Runtime(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn runtime(msg: impl Into<String>) -> Error {
    Error::Runtime(msg.into())
}
