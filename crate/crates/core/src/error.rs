use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("condition violated: {condition}")]
    ConditionViolated { condition: String },
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("map is not invertible: {0}")]
    NonInvertible(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("unsupported extension degree: {0}")]
    UnsupportedM(String),
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("operands live in different fields")]
    ContextMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn violated(condition: impl Into<String>) -> Error {
        Error::ConditionViolated { condition: condition.into() }
    }
}
