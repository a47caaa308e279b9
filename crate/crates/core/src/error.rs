use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("non-canonical input `{input}`; canonical form is `{canonical}`")]
    NonCanonical { input: String, canonical: String },
    #[error("{0}")]
    Domain(String),
    #[error("ambient mismatch: {0}")]
    Ambient(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("size guard exceeded: {0}")]
    TooLarge(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// True for errors raised while reading text input.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::NonCanonical { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
