//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |H[i][j] - conj(H[j][i])| = {deviation:.3e} exceeds tolerance")]
    NonHermitian { deviation: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal mass {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("operator has a negative eigenvalue {lambda:.3e} below the clamping floor")]
    NegativeEigenvalue { lambda: f64 },

    #[error("dimension mismatch: {context} ({left} vs {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("unknown outcome index {index} for a space of {size} points")]
    UnknownOutcome { index: usize, size: usize },

    #[error("invalid metric: {reason}")]
    InvalidMetric { reason: String },

    #[error("invalid POVM: {reason}")]
    InvalidPovm { reason: String },

    #[error("operator family is not positive semidefinite: min eigenvalue {lambda:.3e}")]
    NotPositive { lambda: f64 },

    #[error("observables live on incompatible outcome spaces")]
    IncompatibleSpaces,

    #[error("signed measure is not balanced: sum = {sum:.3e}")]
    UnbalancedMeasure { sum: f64 },

    #[error("vertex enumeration supports at most {max} outcomes, got {size}")]
    VertexEnumerationTooLarge { size: usize, max: usize },

    #[error("confidence parameter {value} outside {expected}")]
    InvalidEpsilon { value: f64, expected: &'static str },

    #[error("argument {value} outside domain {domain}")]
    DomainViolation { value: f64, domain: &'static str },

    #[error("cannot split {dim} dimensions into {outcomes} nonzero projections")]
    RankInfeasible { dim: usize, outcomes: usize },

    #[error("{context}: {n} qubits exceeds the default desk-scale limit of {max} (pass the override flag to force)")]
    DimensionTooLarge {
        context: &'static str,
        n: usize,
        max: usize,
    },
}
