use thiserror::Error;

/// Failure classes raised by the engine.
///
/// Every variant maps onto one of the machine-readable codes printed by the
/// command line front end (see [`Error::code`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("not a correlation matrix: smallest eigenvalue {min_eigenvalue:.3e} below -1e-10")]
    NotCorrelation { min_eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("state error: {0}")]
    State(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("critical exponent not bracketed: {0}")]
    BracketNotFound(String),

    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Stable error code used on the last line of CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Config { .. } | Error::NotCorrelation { .. } => "E_CONFIG",
            Error::Domain(_) | Error::State(_) | Error::InsufficientData(_) => "E_DOMAIN",
            Error::BracketNotFound(_) => "E_BRACKET",
            Error::CheckFailed(_) => "E_CHECK_FAIL",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
