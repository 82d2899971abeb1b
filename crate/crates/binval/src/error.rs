use thiserror::Error;

/// Errors reported by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must share a length do not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// An argument is outside the domain of the operation.
    #[error("argument out of range: {0}")]
    Domain(String),

    /// A weight vector violates the doubling requirement or contains a
    /// non-positive entry.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    /// A fitness value cannot be produced by any subset of the weights.
    #[error("fitness {fitness} is not a subset sum of the weights (residual {residual})")]
    InconsistentFitness { fitness: f64, residual: f64 },

    /// A stored table does not cover the requested size or mode.
    #[error("table does not cover the request: {0}")]
    TableIncomplete(String),

    /// A configured cap (size, time) was exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Malformed textual input. `line` is 1-based; 0 means "not read from a
    /// file".
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attach a 1-based line number to a parse error; other variants pass
    /// through unchanged.
    pub fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse { msg, .. } => Error::Parse { line, msg },
            other => other,
        }
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse { line: 0, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
