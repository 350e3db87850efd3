use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid base {0}: must be even and between 2 and 14")]
    InvalidBase(u32),
    #[error("value {0} is not representable in Z[1/{1}]")]
    NotRepresentable(String, u32),
    #[error("malformed encoding: {0}")]
    Decode(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("state budget of {0} exceeded")]
    StateBudget(usize),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("inconsistency: {0}")]
    Inconsistent(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
