use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("shape error: expected {expected}, got {actual} ({context})")]
    Shape {
        expected: usize,
        actual: usize,
        context: &'static str,
    },
    #[error("not ready: {0}")]
    NotReady(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index {index} out of bounds for length {len}")]
    Bounds { index: usize, len: usize },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("environment `{0}` does not support hindsight goals")]
    UnsupportedGoal(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn shape(expected: usize, actual: usize, context: &'static str) -> Self {
        Error::Shape {
            expected,
            actual,
            context,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
