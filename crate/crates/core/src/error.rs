use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FinbathError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("shift {shift} exceeds grid span {span}; need a span of at least {required}")]
    Span { shift: f64, span: f64, required: f64 },

    #[error("size error: {0}")]
    Size(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, FinbathError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(FinbathError::Domain(msg.into()))
}
