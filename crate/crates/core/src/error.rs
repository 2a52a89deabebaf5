use thiserror::Error;

/// Errors produced by the construction and reduction routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An input violated a mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// Input text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// The oracle-driven coset enumeration ran past its bound.
    #[error("coset enumeration exceeded the index bound {max}")]
    IndexExceeded { max: usize },
    /// The membership oracle gave answers inconsistent with a subgroup.
    #[error("oracle inconsistency: {0}")]
    OracleConflict(String),
    /// A matrix is not an element of the subgroup at hand.
    #[error("element not in group: {0}")]
    NotInGroup(String),
    /// Geodesic tracing hit a configuration it could not resolve on any base point.
    #[error("tracing degenerate after {attempts} base points: {reason}")]
    Degenerate { attempts: usize, reason: String },
    /// An internal invariant was violated.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
