use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not invertible: {0}")]
    Singular(String),
    #[error("valuation violated: {0}")]
    Valuation(String),
    #[error("insufficient jet order: {0}")]
    InsufficientOrder(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("transcendental function `{0}` is not available in exact mode")]
    Transcendental(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid ambiguity tensor: {0}")]
    InvalidAmbiguity(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("input error: {0}")]
    Input(String),
}

impl Error {
    /// True for errors caused by malformed user input rather than mathematics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::UnknownIdentifier(_)
                | Error::Transcendental(_)
                | Error::InvalidMetric(_)
                | Error::InvalidAmbiguity(_)
                | Error::Input(_)
                | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
