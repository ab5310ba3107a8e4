use thiserror::Error;

use crate::subset::Subset;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is malformed (index out of range, good already present, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A documented precondition of an operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The operation is not available for this input (size cap, valuation class).
    #[error("capability limit in {op}: {reason}")]
    Capability { op: &'static str, reason: String },

    /// An internal invariant failed. Seeing this means a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("matroid axiom '{axiom}' fails: {first} vs {second}")]
    Axiom {
        axiom: &'static str,
        first: Subset,
        second: Subset,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn capability(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Capability {
            op,
            reason: reason.into(),
        }
    }
}
