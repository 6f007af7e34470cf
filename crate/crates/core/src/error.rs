use thiserror::Error;

/// Errors raised by the library.
///
/// `Internal` marks broken invariants (a construction bug rather than bad
/// input); the CLI maps it to a distinct exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("value {0} is not a dyadic rational")]
    NonDyadic(String),

    #[error("alternation violated at letter {index}: {detail}")]
    Alternation { index: usize, detail: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("ambiguous match: {0}")]
    Ambiguous(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("search budget exhausted: {0}")]
    Budget(String),

    #[error("partial atoms at window boundary: {0}")]
    PartialAtoms(String),

    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
