//! Error type for the cone solvers.
//!
//! Numerical failure to certify either side of a membership question is a
//! first-class outcome (`Indeterminate`), never a silent verdict.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Diagnostics attached to an indeterminate verdict: how close each side got.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IndeterminateReport {
    /// Best reconstruction residual reached by the primal side, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primal_residual: Option<f64>,
    /// `tr(G gamma)` of the best witness candidate, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_trace: Option<f64>,
    /// Smallest generator value / block eigenvalue of the witness candidate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_min_value: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] covcone_core::Error),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operation needs a nonempty generator set")]
    EmptyGeneratorSet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error(
        "indeterminate: cannot certify membership or separation at the configured tolerances ({})",
        .0.detail
    )]
    Indeterminate(Box<IndeterminateReport>),
}

pub type Result<T> = std::result::Result<T, Error>;
