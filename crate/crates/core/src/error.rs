use thiserror::Error;

/// Errors raised by flatlab computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid length: {0}")]
    InvalidLength(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("grid too coarse: {0}")]
    GridResolution(String),

    #[error("cannot normalize the zero polynomial")]
    ZeroPolynomial,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("capability limit exceeded: {0}")]
    Capability(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("consistency failure: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for errors caused by bad user input rather than numeric limits.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidLength(_) | Error::Parameter(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
