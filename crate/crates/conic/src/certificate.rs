//! Checkable verdicts: every decision carries either an explicit conic
//! decomposition or a separating witness, and both re-verify independently
//! of solver internals.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use covcone_core::{linalg, CovMatrix, Tolerances};

use crate::canonical::CanonicalP;
use crate::generators::GeneratorSet;

/// How far a witness may deviate from exact normalization.
pub const WITNESS_NORM_TOL: f64 = 1e-9;

/// One nonnegative coefficient of a conic decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefEntry {
    /// Index into the generator set the certificate was produced against.
    pub generator: usize,
    pub coefficient: f64,
}

/// Decision for membership in a finitely generated cone `cone{w_k w_k^T}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum ConicCertificate {
    /// `gamma = sum_k mu_k w_k w_k^T` with `mu >= 0`.
    #[serde(rename = "MEMBER")]
    Member {
        coefficients: Vec<CoefEntry>,
        /// Frobenius residual of the reconstruction.
        residual: f64,
        tolerances: Tolerances,
    },
    /// Separating hyperplane: `tr(G gamma) < 0` while `w_k^T G w_k >= 0`.
    #[serde(rename = "NOT_MEMBER")]
    NotMember {
        /// Symmetric witness, normalized to unit Frobenius norm.
        witness: Vec<Vec<f64>>,
        /// `tr(G gamma)`, strictly negative.
        trace_margin: f64,
        /// `min_k w_k^T G w_k`; `None` when the generator set is empty.
        min_generator_value: Option<f64>,
        tolerances: Tolerances,
    },
}

impl ConicCertificate {
    pub fn is_member(&self) -> bool {
        matches!(self, ConicCertificate::Member { .. })
    }

    pub fn witness_matrix(&self) -> Option<DMatrix<f64>> {
        match self {
            ConicCertificate::NotMember { witness, .. } => Some(rows_to_matrix(witness)),
            _ => None,
        }
    }
}

/// Decision for membership in the free-spectrum cone `sum_P P Z_P P^T`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum SdpCertificate {
    #[serde(rename = "MEMBER")]
    Member {
        /// One PSD block per canonical pattern, aligned with the pattern list.
        blocks: Vec<Vec<Vec<f64>>>,
        residual: f64,
        tolerances: Tolerances,
    },
    #[serde(rename = "NOT_MEMBER")]
    NotMember {
        witness: Vec<Vec<f64>>,
        trace_margin: f64,
        /// `min_P lambda_min(P^T G P)`.
        min_block_eigenvalue: f64,
        tolerances: Tolerances,
    },
}

impl SdpCertificate {
    pub fn is_member(&self) -> bool {
        matches!(self, SdpCertificate::Member { .. })
    }

    pub fn witness_matrix(&self) -> Option<DMatrix<f64>> {
        match self {
            SdpCertificate::NotMember { witness, .. } => Some(rows_to_matrix(witness)),
            _ => None,
        }
    }
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, rows.first().map_or(0, |r| r.len()), |i, j| rows[i][j])
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// A named certificate condition that failed re-verification.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Violation {
    #[error("certificate and target dimensions disagree")]
    DimensionMismatch,
    #[error("generator index {0} out of range")]
    GeneratorIndexOutOfRange(usize),
    #[error("coefficient {index} is negative: {value}")]
    NegativeCoefficient { index: usize, value: f64 },
    #[error("reconstruction residual {residual} exceeds allowance {allowed}")]
    ReconstructionResidual { residual: f64, allowed: f64 },
    #[error("block {index} is not positive semidefinite: min eigenvalue {min_eig}")]
    BlockNotPsd { index: usize, min_eig: f64 },
    #[error("witness is not symmetric (asymmetry {0})")]
    WitnessAsymmetric(f64),
    #[error("witness norm {0} is not 1")]
    WitnessNotNormalized(f64),
    #[error("witness trace margin {value} is not below {required}")]
    TraceMarginViolated { value: f64, required: f64 },
    #[error("generator {index} has witness value {value} below floor {floor}")]
    GeneratorValueNegative {
        index: usize,
        value: f64,
        floor: f64,
    },
    #[error("pattern {index} has witness block eigenvalue {value} below floor {floor}")]
    BlockValueNegative {
        index: usize,
        value: f64,
        floor: f64,
    },
}

fn check_witness_shape(
    witness: &[Vec<f64>],
    n: usize,
) -> std::result::Result<DMatrix<f64>, Violation> {
    if witness.len() != n || witness.iter().any(|r| r.len() != n) {
        return Err(Violation::DimensionMismatch);
    }
    let g = rows_to_matrix(witness);
    let asym = linalg::max_asymmetry(&g);
    if asym > 1e-12 {
        return Err(Violation::WitnessAsymmetric(asym));
    }
    let norm = g.norm();
    if (norm - 1.0).abs() > WITNESS_NORM_TOL {
        return Err(Violation::WitnessNotNormalized(norm));
    }
    Ok(g)
}

/// Re-checks every inequality of a polyhedral-cone certificate at the stated
/// tolerances, independently of how it was produced.
pub fn verify_conic_certificate(
    cert: &ConicCertificate,
    gamma: &CovMatrix,
    gens: &GeneratorSet,
) -> std::result::Result<(), Violation> {
    let n = gamma.n();
    if gens.n() != n {
        return Err(Violation::DimensionMismatch);
    }
    match cert {
        ConicCertificate::Member {
            coefficients,
            tolerances,
            ..
        } => {
            let mut recon = DMatrix::<f64>::zeros(n, n);
            for e in coefficients {
                if e.generator >= gens.len() {
                    return Err(Violation::GeneratorIndexOutOfRange(e.generator));
                }
                if !(e.coefficient >= 0.0) {
                    return Err(Violation::NegativeCoefficient {
                        index: e.generator,
                        value: e.coefficient,
                    });
                }
                recon += gens.get(e.generator).outer() * e.coefficient;
            }
            let residual = (recon - gamma.to_dmatrix()).norm();
            let allowed = tolerances.member_residual(gamma.frobenius_norm());
            if residual > allowed {
                return Err(Violation::ReconstructionResidual { residual, allowed });
            }
            Ok(())
        }
        ConicCertificate::NotMember {
            witness,
            tolerances,
            ..
        } => {
            let g = check_witness_shape(witness, n)?;
            let trace = gamma.inner(&g);
            if trace > -tolerances.witness_margin {
                return Err(Violation::TraceMarginViolated {
                    value: trace,
                    required: -tolerances.witness_margin,
                });
            }
            for (k, gen) in gens.iter().enumerate() {
                let v = gen.quad(&g);
                if v < -tolerances.witness_margin {
                    return Err(Violation::GeneratorValueNegative {
                        index: k,
                        value: v,
                        floor: -tolerances.witness_margin,
                    });
                }
            }
            Ok(())
        }
    }
}

/// Re-checks an SDP certificate: PSD blocks and reconstruction on the member
/// side, trace margin plus per-pattern nonnegativity on the witness side.
pub fn verify_sdp_certificate(
    cert: &SdpCertificate,
    gamma: &CovMatrix,
    pset: &[CanonicalP],
) -> std::result::Result<(), Violation> {
    let n = gamma.n();
    match cert {
        SdpCertificate::Member {
            blocks,
            tolerances,
            ..
        } => {
            if blocks.len() != pset.len() {
                return Err(Violation::DimensionMismatch);
            }
            let mut recon = DMatrix::<f64>::zeros(n, n);
            for (idx, (z_rows, p)) in blocks.iter().zip(pset).enumerate() {
                if p.rows() != n {
                    return Err(Violation::DimensionMismatch);
                }
                let k = p.cols();
                if z_rows.len() != k || z_rows.iter().any(|r| r.len() != k) {
                    return Err(Violation::DimensionMismatch);
                }
                let z = rows_to_matrix(z_rows);
                let min_eig = linalg::min_eigenvalue(&z);
                if min_eig < tolerances.psd_floor(z.norm()) {
                    return Err(Violation::BlockNotPsd { index: idx, min_eig });
                }
                let pm = p.to_dmatrix();
                recon += &pm * z * pm.transpose();
            }
            let residual = (recon - gamma.to_dmatrix()).norm();
            let allowed = tolerances.member_residual(gamma.frobenius_norm());
            if residual > allowed {
                return Err(Violation::ReconstructionResidual { residual, allowed });
            }
            Ok(())
        }
        SdpCertificate::NotMember {
            witness,
            tolerances,
            ..
        } => {
            let g = check_witness_shape(witness, n)?;
            let trace = gamma.inner(&g);
            if trace > -tolerances.witness_margin {
                return Err(Violation::TraceMarginViolated {
                    value: trace,
                    required: -tolerances.witness_margin,
                });
            }
            for (idx, p) in pset.iter().enumerate() {
                let pm = p.to_dmatrix();
                let block = pm.transpose() * &g * &pm;
                let v = linalg::min_eigenvalue(&linalg::symmetrize(&block));
                if v < -tolerances.witness_margin {
                    return Err(Violation::BlockValueNegative {
                        index: idx,
                        value: v,
                        floor: -tolerances.witness_margin,
                    });
                }
            }
            Ok(())
        }
    }
}
