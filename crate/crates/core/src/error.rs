//! Error type for domain validation and structural mismatches.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("site count mismatch: expected {expected}, got {got}")]
    SiteCountMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("detector moment inequality violated at site {site}, state {state}: second moment {second} < squared mean {mean_sq}")]
    MomentInequality {
        site: usize,
        state: usize,
        second: f64,
        mean_sq: f64,
    },

    #[error("matrix is not symmetric: max asymmetry {max_dev} exceeds {tol}")]
    Asymmetric { max_dev: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig} below floor {floor}")]
    NotPositiveSemidefinite { min_eig: f64, floor: f64 },

    #[error("outcome {outcome} out of range 1..={dim} at site {site}")]
    OutcomeOutOfRange {
        site: usize,
        outcome: usize,
        dim: usize,
    },

    #[error("joint table with {cells} cells exceeds the dense-evaluation limit of {limit}")]
    DeskScaleExceeded { cells: usize, limit: usize },
}
