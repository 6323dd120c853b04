use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two grids cannot be reconciled without resampling.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Array shapes disagree.
    #[error("shape error: {0}")]
    Shape(String),

    /// A configuration value is invalid or insufficient.
    #[error("config error: {0}")]
    Config(String),

    /// A theorem hypothesis required by a calculator does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A requested alternative is not a valid density.
    #[error("infeasible alternative: {0}")]
    Infeasible(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Serialization(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
