use thiserror::Error;

use crate::spectral::EigenResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("comparison ({i}, {j}) has value {value} outside [-{max}, {max}]")]
    OutOfRange {
        i: usize,
        j: usize,
        value: f64,
        max: f64,
    },

    #[error("duplicate comparison for pair ({i}, {j})")]
    DuplicatePair { i: usize, j: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("alignment undefined: |<reference, x>| = {0:e}")]
    AlignmentUndefined(f64),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    /// The eigensolver ran out of budget. The best iterate is kept so callers
    /// can continue from it.
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        best: Option<Box<EigenResult>>,
    },

    #[error("leading eigenvalue is degenerate (gap {gap:e} below tolerance {tol:e})")]
    DegenerateSpectrum {
        gap: f64,
        tol: f64,
        best: Option<Box<EigenResult>>,
    },

    #[error("certificate verification failed: {0}")]
    Certificate(Box<Error>),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Best-effort eigenpair carried by eigensolver failures.
    pub fn best_eigenpair(&self) -> Option<&EigenResult> {
        match self {
            Error::NotConverged { best, .. } | Error::DegenerateSpectrum { best, .. } => {
                best.as_deref()
            }
            _ => None,
        }
    }
}
