use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("invalid Bernstein function: {0}")]
    InvalidBernstein(String),
    #[error("scaling violation: {0}")]
    ScalingViolation(String),
    #[error("value out of range: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("quadrature did not settle: {0}")]
    Quadrature(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("fixture drift: {}", .0.join("; "))]
    FixtureDrift(Vec<String>),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
