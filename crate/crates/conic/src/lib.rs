//! Certificate-producing feasibility and linear optimization over the
//! covariance cones generated by discrete microscopic models, plus the
//! fixed-spectrum, free-spectrum and bipartite-chain decision procedures
//! built on them.
//!
//! Solvers are stateless; every verdict is returned together with a
//! certificate (conic decomposition or separating witness) that re-verifies
//! independently of solver internals.

pub mod canonical;
pub mod certificate;
pub mod chain;
pub mod error;
pub mod fixedspec;
pub mod freespec;
pub mod generators;
pub mod lp;
pub mod sdp;
mod simplex;

pub use canonical::{enumerate_canonical_p, CanonicalP, EnumeratedP};
pub use certificate::{
    verify_conic_certificate, verify_sdp_certificate, CoefEntry, ConicCertificate, SdpCertificate,
    Violation,
};
pub use error::{Error, IndeterminateReport, Result};
pub use generators::{canonical_direction, Generator, GeneratorSet, Provenance};
pub use lp::{cone_linear_opt, cone_membership_lp};
pub use sdp::{pencil_max, sdp_linear_opt, sdp_membership, SdpOpt, SdpOptions};
