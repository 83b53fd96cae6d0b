use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("method `{method}` unavailable: {reason}")]
    MethodUnavailable { method: &'static str, reason: String },
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("support maximizer is not unique in direction {0:?} (flat face)")]
    NonUniqueMaximizer(Vec<f64>),
    #[error("boundary is not smooth at the point with normal {0:?}")]
    NonSmooth(Vec<f64>),
    #[error("degenerate curvature in direction {0:?}")]
    DegenerateCurvature(Vec<f64>),
    #[error("frequency {0:?} lies outside the normal cone of the cutoff window")]
    ConeViolation(Vec<f64>),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("density failure: {0}")]
    DensityFailure(String),
    #[error("configuration error for `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
