use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied an argument outside the operation's domain.
    #[error("invalid input: {0}")]
    Input(String),

    /// A size or memory cap would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("degenerate function: {0}")]
    Degenerate(String),

    /// An operation's structural precondition does not hold (e.g. a set is not a base).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The instance failed schema or property validation; `location` names the offending field.
    #[error("validation error at {location}: {message}")]
    Validation { location: String, message: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            location: location.into(),
            message: message.into(),
        }
    }
}
