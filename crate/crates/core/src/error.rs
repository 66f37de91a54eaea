use thiserror::Error;

/// Errors raised by the toolkit. Each variant maps to one failure class so
/// callers (and the CLI exit-code logic) can distinguish a bad request from a
/// mathematical outcome.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integrability error: {0}")]
    Integrability(String),
    #[error("degree overflow: requested degree {requested}, rule resolves {available}")]
    DegreeOverflow { requested: usize, available: usize },
    #[error("bisection failure: {0}")]
    BisectionFailure(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("body is not a certified non-member: {0}")]
    NotNonMember(String),
    #[error("epsilon schedule exhausted: {0}")]
    EpsilonExhausted(String),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors describing a malformed request rather than a
    /// mathematical outcome.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::Pole(_)
                | Error::Domain(_)
                | Error::Integrability(_)
                | Error::DegreeOverflow { .. }
                | Error::InvalidBody(_)
                | Error::Invalid(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
