use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or invalid user input (bad weights, mismatched supports).
    #[error("invalid input: {0}")]
    Input(String),

    /// An argument lies outside the domain of the mathematical definition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The exact computation would exceed the configured support size limit.
    #[error("capacity exceeded: support size {size} > limit {limit}; {hint}")]
    Capacity {
        size: usize,
        limit: usize,
        hint: &'static str,
    },

    /// A numerical routine failed in a way that should be unreachable.
    #[error("internal numerical failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
