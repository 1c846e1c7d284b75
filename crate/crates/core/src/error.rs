use thiserror::Error;

/// Errors raised by the calculus. Check suites never return these for law
/// violations; they report failures with witnesses instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invariant `{invariant}` violated: {detail}")]
    Invariant { invariant: String, detail: String },

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("point lies outside the filtration term: {0}")]
    Filtration(String),
}

impl Error {
    pub(crate) fn arity(msg: impl Into<String>) -> Self {
        Error::Arity(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(invariant: &str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            invariant: invariant.to_string(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
