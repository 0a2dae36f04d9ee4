//! Free-spectrum cone machinery: feasibility of `gamma = sum_P P Z_P P^T`
//! with PSD blocks, and linear optimization over the trace-1 slice.
//!
//! Feasibility is decided by minimizing `||sum_P P Z_P P^T - gamma||_F^2`
//! with exact cyclic block updates: for one pattern at a time the optimal
//! PSD block has a closed form through the thin QR factorization of `P`.
//! At the minimum the (normalized, negated) residual is a valid separating
//! witness whenever the distance is positive: the stationarity conditions
//! are exactly the witness conditions `P^T G P >= 0`, `tr(G gamma) < 0`.

use nalgebra::{DMatrix, DVector};

use covcone_core::{linalg, CovMatrix, Tolerances};

use crate::certificate::{matrix_to_rows, SdpCertificate};
use crate::canonical::CanonicalP;
use crate::error::{Error, IndeterminateReport, Result};

/// Iteration controls for the block-descent solver.
#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub max_sweeps: usize,
    /// Sweeps with relative residual progress below this count as stalled.
    pub stall_tol: f64,
    pub stall_patience: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 200_000,
            stall_tol: 1e-12,
            stall_patience: 8,
        }
    }
}

struct Block {
    p: DMatrix<f64>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    /// current projected middle factor, `image = q * mid * q^T`
    mid: DMatrix<f64>,
    image: DMatrix<f64>,
}

impl Block {
    fn new(p: &CanonicalP) -> Result<Self> {
        let pm = p.to_dmatrix();
        let k = pm.ncols();
        let qr = pm.clone().qr();
        let q = qr.q();
        let r = qr.r();
        for i in 0..k {
            if r[(i, i)].abs() < 1e-12 {
                return Err(Error::NumericalFailure(
                    "canonical pattern is column rank deficient".into(),
                ));
            }
        }
        let n = pm.nrows();
        Ok(Self {
            p: pm,
            q,
            r,
            mid: DMatrix::zeros(k, k),
            image: DMatrix::zeros(n, n),
        })
    }

    /// `Z = R^{-1} mid R^{-T}` recovers the PSD block from the projected
    /// middle factor.
    fn z(&self) -> DMatrix<f64> {
        let y = self
            .r
            .clone()
            .solve_upper_triangular(&self.mid)
            .expect("validated nonsingular");
        let z_t = self
            .r
            .clone()
            .solve_upper_triangular(&y.transpose())
            .expect("validated nonsingular");
        linalg::symmetrize(&z_t.transpose())
    }
}

/// Decides whether `gamma` admits PSD blocks `Z_P` with
/// `gamma = sum_P P Z_P P^T` over the given canonical patterns.
pub fn sdp_membership(
    gamma: &CovMatrix,
    pset: &[CanonicalP],
    tol: &Tolerances,
) -> Result<SdpCertificate> {
    sdp_membership_with(gamma, pset, tol, &SdpOptions::default())
}

pub fn sdp_membership_with(
    gamma: &CovMatrix,
    pset: &[CanonicalP],
    tol: &Tolerances,
    opts: &SdpOptions,
) -> Result<SdpCertificate> {
    let n = gamma.n();
    for p in pset {
        if p.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "pattern with {} rows against a {n} x {n} target",
                p.rows()
            )));
        }
    }
    let norm = gamma.frobenius_norm();
    if pset.is_empty() {
        if norm == 0.0 {
            return Ok(SdpCertificate::Member {
                blocks: Vec::new(),
                residual: 0.0,
                tolerances: *tol,
            });
        }
        let g = -gamma.to_dmatrix() / norm;
        return Ok(SdpCertificate::NotMember {
            witness: matrix_to_rows(&g),
            trace_margin: -norm,
            min_block_eigenvalue: f64::INFINITY,
            tolerances: *tol,
        });
    }

    let target = gamma.to_dmatrix();
    let mut blocks: Vec<Block> = pset.iter().map(Block::new).collect::<Result<_>>()?;
    let mut sum = DMatrix::<f64>::zeros(n, n);
    let member_tol = tol.member_residual(norm);

    let mut prev_res = f64::INFINITY;
    let mut stalled = 0usize;
    let mut sweeps = 0usize;
    let residual_of = |sum: &DMatrix<f64>| (&target - sum).norm();
    loop {
        for b in blocks.iter_mut() {
            let t = &target - (&sum - &b.image);
            let projected = linalg::symmetrize(&(b.q.transpose() * &t * &b.q));
            let mid = linalg::psd_project(&projected);
            let image = &b.q * &mid * b.q.transpose();
            sum += &image - &b.image;
            b.mid = mid;
            b.image = image;
        }
        sweeps += 1;
        if sweeps % 512 == 0 {
            // defeat additive drift
            sum = DMatrix::zeros(n, n);
            for b in &blocks {
                sum += &b.image;
            }
        }
        let res = residual_of(&sum);
        if res <= 0.25 * member_tol {
            break;
        }
        if prev_res - res <= opts.stall_tol * (1.0 + norm) {
            stalled += 1;
            if stalled >= opts.stall_patience {
                break;
            }
        } else {
            stalled = 0;
        }
        prev_res = res;
        if sweeps >= opts.max_sweeps {
            break;
        }
    }

    let residual = residual_of(&sum);
    if residual <= member_tol {
        let z_blocks: Vec<Vec<Vec<f64>>> = blocks.iter().map(|b| matrix_to_rows(&b.z())).collect();
        return Ok(SdpCertificate::Member {
            blocks: z_blocks,
            residual,
            tolerances: *tol,
        });
    }
    // separating side: G = -(gamma - sum)/||gamma - sum||, polished onto the
    // dual-feasible set {G : P^T G P >= 0 for all P}
    let g = polish_witness((&sum - &target) / residual, &blocks);
    let trace = gamma.inner(&g);
    let min_block = blocks
        .iter()
        .map(|b| linalg::min_eigenvalue(&linalg::symmetrize(&(b.p.transpose() * &g * &b.p))))
        .fold(f64::INFINITY, f64::min);
    if trace <= -tol.witness_margin && min_block >= -tol.witness_margin {
        return Ok(SdpCertificate::NotMember {
            witness: matrix_to_rows(&g),
            trace_margin: trace,
            min_block_eigenvalue: min_block,
            tolerances: *tol,
        });
    }
    Err(Error::Indeterminate(Box::new(IndeterminateReport {
        primal_residual: Some(residual),
        witness_trace: Some(trace),
        witness_min_value: Some(min_block),
        detail: format!("block descent stopped after {sweeps} sweeps with neither side certified"),
    })))
}

/// Cyclic projections onto the sets `{G : Q^T G Q >= 0}` (equivalent to
/// `P^T G P >= 0` since `P = Q R` with `R` invertible), each of which only
/// rewrites the `Q`-block of `G` and is therefore an exact Frobenius
/// projection. The block descent leaves the residual direction a hair
/// outside the dual cone; this pushes it in. Renormalized on return.
fn polish_witness(mut g: DMatrix<f64>, blocks: &[Block]) -> DMatrix<f64> {
    const ROUNDS: usize = 500;
    const CLEAN: f64 = 1e-12;
    let mut prev = f64::INFINITY;
    for _ in 0..ROUNDS {
        let mut worst: f64 = 0.0;
        for b in blocks {
            let m = linalg::symmetrize(&(b.q.transpose() * &g * &b.q));
            let proj = linalg::psd_project(&m);
            let neg = &m - &proj;
            let defect = neg.norm();
            if defect > 0.0 {
                g -= &b.q * neg * b.q.transpose();
            }
            worst = worst.max(defect);
        }
        // stop on convergence or stagnation; the caller re-verifies margins
        if worst <= CLEAN || worst > 0.95 * prev {
            break;
        }
        prev = worst;
    }
    let norm = g.norm();
    if norm > 0.0 {
        g /= norm;
    }
    linalg::symmetrize(&g)
}

/// Result of linear optimization over the trace-1 slice of the pattern cone.
#[derive(Debug, Clone)]
pub struct SdpOpt {
    /// `max tr(A gamma)` over the slice.
    pub value: f64,
    /// Index of the attaining pattern.
    pub argmax: usize,
    /// Parameter vector `z` with the optimum at `P z z^T P^T` (normalized to
    /// unit trace).
    pub direction: DVector<f64>,
}

/// Maximizes `tr(A gamma)` over `{gamma in cone, tr(gamma) = 1}`.
///
/// Extreme rays are `P z z^T P^T`, so the optimum is the largest generalized
/// eigenvalue of the pencil `(P^T A P, P^T P)`, maximized over patterns.
pub fn sdp_linear_opt(objective: &DMatrix<f64>, pset: &[CanonicalP]) -> Result<SdpOpt> {
    if pset.is_empty() {
        return Err(Error::EmptyGeneratorSet);
    }
    let n = objective.nrows();
    if objective.ncols() != n {
        return Err(Error::DimensionMismatch("objective must be square".into()));
    }
    let mut best: Option<SdpOpt> = None;
    for (idx, p) in pset.iter().enumerate() {
        if p.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "pattern with {} rows against a {n} x {n} objective",
                p.rows()
            )));
        }
        let pm = p.to_dmatrix();
        let m = linalg::symmetrize(&(pm.transpose() * objective * &pm));
        let b = pm.transpose() * &pm;
        let (value, z) = pencil_max(&m, &b)?;
        if best.as_ref().map_or(true, |bst| value > bst.value) {
            best = Some(SdpOpt {
                value,
                argmax: idx,
                direction: z,
            });
        }
    }
    Ok(best.expect("nonempty pattern set"))
}

/// Largest generalized eigenvalue of `(M, B)` with `B` symmetric positive
/// definite, and its eigenvector: reduces to an ordinary symmetric problem
/// through the Cholesky factor of `B`.
pub fn pencil_max(m: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("pencil base matrix is not positive definite".into()))?;
    let l = chol.l();
    let y = l
        .clone()
        .solve_lower_triangular(m)
        .ok_or_else(|| Error::NumericalFailure("singular Cholesky factor".into()))?;
    let c = l
        .clone()
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::NumericalFailure("singular Cholesky factor".into()))?;
    let c = linalg::symmetrize(&c);
    let (vals, vecs) = linalg::sym_eigen(&c);
    let top = vals.len() - 1;
    let u = vecs.column(top).into_owned();
    // back-substitute to the pencil eigenvector: z = L^{-T} u
    let z = l
        .transpose()
        .solve_upper_triangular(&u)
        .ok_or_else(|| Error::NumericalFailure("singular Cholesky factor".into()))?;
    Ok((vals[top], z))
}
