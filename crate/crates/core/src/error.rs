use thiserror::Error;

/// Errors raised by the driftwatch library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "window of length {n} is too short for the embedding; need at least {minimum} observations"
    )]
    WindowTooShort { n: usize, minimum: usize },

    #[error("embedding dimension m = 1 leaves no output coordinate")]
    NoOutputDimension,

    #[error("need at least {required} phase states, got {got}")]
    InsufficientStates { got: usize, required: usize },

    #[error("incompatible phase spaces: {0}")]
    IncompatibleSpaces(String),

    #[error("incompatible features: expected dimension {expected}, got {got}")]
    IncompatibleFeatures { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
