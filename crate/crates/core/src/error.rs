use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported dimension {got} (expected {expected})")]
    Dimension { got: usize, expected: String },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("comparison undecided after {bits} bits of precision")]
    Indeterminate { bits: u32 },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("client {client} cannot be served: no open center and no penalty")]
    Unservable { client: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance has no threshold")]
    MissingThreshold,

    #[error("candidate degeneracy persists after {retries} perturbation attempts")]
    DegeneracyPersists { retries: u32 },

    #[error("center perturbation failed: {0}")]
    Perturbation(String),

    #[error("instance too large: {clients} clients exceed cap {cap} (about {bytes} bytes required)")]
    TooLarge { clients: u64, cap: u64, bytes: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("aborted on case {case}: {source}")]
    CaseAborted { case: String, source: Box<Error> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Whether this error (or the error it wraps) is a precision-cap abort.
    pub fn is_indeterminate(&self) -> bool {
        match self {
            Error::Indeterminate { .. } => true,
            Error::CaseAborted { source, .. } => source.is_indeterminate(),
            _ => false,
        }
    }
}
