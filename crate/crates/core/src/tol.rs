//! Single-knob tolerance policy.
//!
//! Every "is this zero / nonnegative / reconstructed" decision in the
//! workspace goes through one of these thresholds so that verdicts are
//! reproducible and overridable from one place.

use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by solvers, certificates and verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute residual tolerance for identity checks (reconstructions,
    /// cross-operation agreements).
    pub residual_abs: f64,
    /// Scale factor for certificate reconstruction: a MEMBER certificate must
    /// reproduce the target within `member_scale * (1 + ||gamma||_F)`.
    pub member_scale: f64,
    /// Scale factor for positive-semidefiniteness: eigenvalues must stay
    /// above `-psd_scale * (1 + norm)`.
    pub psd_scale: f64,
    /// Absolute margin a separating witness must achieve: `tr(G gamma)` at
    /// most `-witness_margin`, generator/block values at least
    /// `-witness_margin`.
    pub witness_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual_abs: 1e-8,
            member_scale: 1e-7,
            psd_scale: 1e-9,
            witness_margin: 1e-9,
        }
    }
}

impl Tolerances {
    /// Largest acceptable reconstruction residual for a membership
    /// certificate against a target of the given Frobenius norm.
    pub fn member_residual(&self, norm: f64) -> f64 {
        self.member_scale * (1.0 + norm)
    }

    /// Smallest acceptable eigenvalue for a matrix of the given norm to
    /// still count as positive semidefinite.
    pub fn psd_floor(&self, norm: f64) -> f64 {
        -self.psd_scale * (1.0 + norm)
    }

    /// Validates that every threshold is strictly positive.
    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [
            ("residual_abs", self.residual_abs),
            ("member_scale", self.member_scale),
            ("psd_scale", self.psd_scale),
            ("witness_margin", self.witness_margin),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(crate::Error::InvalidValue(format!(
                    "tolerance `{name}` must be a positive finite number, got {v}"
                )));
            }
        }
        Ok(())
    }
}
