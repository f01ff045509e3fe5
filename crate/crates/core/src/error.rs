use thiserror::Error;

/// Errors raised by the toolkit.
///
/// [`Error::is_verification_failure`] separates checks that ran and failed
/// (a certificate violated at some point, a claimed strength that does not
/// hold) from malformed requests.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown function family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("operation requires {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("search exhausted: {0}")]
    Exhausted(String),

    #[error("cell {cell}: {source}")]
    Cell { cell: String, source: Box<Error> },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_verification_failure(&self) -> bool {
        match self {
            Error::Verification(_) => true,
            Error::Cell { source, .. } => source.is_verification_failure(),
            _ => false,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub(crate) fn verification(msg: impl Into<String>) -> Self {
        Error::Verification(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
