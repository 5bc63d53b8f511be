use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by the CLI exit-code contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The caller supplied an argument outside the operation's domain.
    RejectedInput,
    /// The mathematical function is undefined at the point (a pole).
    Domain,
    /// The request is valid but exceeds a configured or numerical limit.
    Capability,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("rejected input: {0}")]
    RejectedInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capability exceeded: {message}")]
    Capability {
        message: String,
        /// Best bound or size that could be achieved, when one is known.
        achievable: Option<f64>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::RejectedInput(_) => ErrorKind::RejectedInput,
            Error::Domain(_) => ErrorKind::Domain,
            Error::Capability { .. } => ErrorKind::Capability,
        }
    }

    pub(crate) fn rejected(msg: impl Into<String>) -> Self {
        Error::RejectedInput(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>, achievable: Option<f64>) -> Self {
        Error::Capability {
            message: msg.into(),
            achievable,
        }
    }
}
