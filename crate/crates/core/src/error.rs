use thiserror::Error;

/// Errors raised by the solver suite.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The operation is well defined but the instance lies outside the regime it covers.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("size cap exceeded: {what} (n = {n}, cap = {cap})")]
    SizeCap { what: &'static str, n: usize, cap: usize },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
