use thiserror::Error;

/// Errors produced by the optimization toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} for parameter `{param}` is outside its declared domain")]
    Bounds { param: String, value: String },

    #[error("feasibility error: {0}")]
    Feasibility(String),

    #[error("unknown surface `{0}`")]
    Name(String),

    #[error("surface `{0}` is not discrete")]
    Kind(String),

    #[error("objective specification error: {0}")]
    Spec(String),

    #[error("space mismatch: expected {expected} dimensions, got {actual}")]
    SpaceMismatch { expected: usize, actual: usize },

    #[error("campaign history is empty")]
    EmptyHistory,

    #[error("invalid parameter definition: {0}")]
    InvalidParameter(String),

    #[error("config error at `{pointer}`: {message}")]
    Config { pointer: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
