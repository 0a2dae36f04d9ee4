//! Independent brute-force verifiers for the cone solvers: seeded model
//! sampling, Monte-Carlo covariance estimation, the symmetrization
//! decomposition into two-point atoms, exact rational cone membership for
//! 2 x 2 targets, and interval-partition optimization.
//!
//! Nothing in this crate calls a solver; the crate dependency graph enforces
//! that oracles and solvers can only meet in test code.

pub mod decompose;
pub mod exact2x2;
pub mod intervals;
pub mod sample;

pub use decompose::{reconstruct_naked, symmetrize_decompose, Atom};
pub use exact2x2::{exact_2x2_membership, ExactVerdict, Rat, RationalCov2};
pub use intervals::{interval_partition_opt, IntervalOpt};
pub use sample::{derived_seed, mc_covariance, sample_micromodel, Seed};
