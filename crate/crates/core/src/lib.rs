//! Domain types and exact evaluation for macroscopic covariance matrices
//! generated by sums of independent tuples of finitely-valued microscopic
//! variables.
//!
//! A *microscopic model* is a weighted collection of independent n-tuples of
//! discrete random variables; its macroscopic covariance matrix is evaluated
//! exactly from the per-tuple joint distributions. This crate holds the data
//! model (spectra, covariance matrices, joint tables, detector response
//! banks), the evaluation of covariances, and the construction of the naked
//! and dressed rank-1 generators that span the attainable covariance cones.
//!
//! All operations here are pure functions of their inputs and safe to call
//! concurrently.

pub mod cov;
pub mod detector;
pub mod error;
pub mod linalg;
pub mod model;
pub mod naked;
pub mod spectrum;
pub mod tol;

pub use cov::CovMatrix;
pub use detector::{detector_reduction, DetectorBank, DetectorReduction, ResponseMoments};
pub use error::Error;
pub use model::{covariance_of_model, JointTable, MicroModel, MicroTuple};
pub use naked::{dressed_generator, naked_covariance, naked_generator, NakedCov};
pub use spectrum::{Spectrum, Truncation};
pub use tol::Tolerances;

/// Convenience alias used throughout the workspace.
pub type Result<T> = std::result::Result<T, Error>;
