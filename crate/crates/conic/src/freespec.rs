//! Free-spectrum (identical-outcomes) decision procedures: membership in
//! the cone generated by tuples of identical d-valued variables, witness
//! validity, the binary-weight witness and the continuum separation bound.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use covcone_core::{linalg, CovMatrix, Tolerances};

use crate::canonical::{enumerate_canonical_p, CanonicalP};
use crate::certificate::SdpCertificate;
use crate::error::{Error, Result};
use crate::sdp::{sdp_linear_opt, sdp_membership};

/// Patterns for an `n`-site, `d`-level membership question. The cone is
/// already full (all PSD matrices) at `d = n + 1`, so larger `d` reuses the
/// `n + 1` pattern set.
pub fn patterns_for(n: usize, d: usize) -> Result<Vec<CanonicalP>> {
    let d_eff = d.min(n + 1);
    Ok(enumerate_canonical_p(n, d_eff)?
        .into_iter()
        .map(|e| e.p)
        .collect())
}

/// Decides whether `gamma` is attainable by sums of tuples of identical
/// d-valued variables with free outcome values.
pub fn membership_free(gamma: &CovMatrix, d: usize, tol: &Tolerances) -> Result<SdpCertificate> {
    if d < 2 {
        return Err(Error::InvalidArgument(
            "free-spectrum membership needs d >= 2".into(),
        ));
    }
    let pset = patterns_for(gamma.n(), d)?;
    sdp_membership(gamma, &pset, tol)
}

/// Validity report for a candidate separating witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessReport {
    /// Valid iff the witness has a negative eigenvalue (so some covariance
    /// matrix violates it) while every pattern block stays PSD.
    pub valid: bool,
    pub min_eigenvalue: f64,
    /// `lambda_min(P^T G P)` per canonical pattern.
    pub per_pattern_min: Vec<f64>,
    /// A violating covariance matrix (outer product of the most negative
    /// eigenvector), present when requested and the witness is valid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violating_example: Option<Vec<Vec<f64>>>,
}

/// Checks that `G` is a witness for the d-level cone: nonnegative on every
/// pattern block yet not PSD itself.
pub fn witness_valid(
    g: &DMatrix<f64>,
    n: usize,
    d: usize,
    with_example: bool,
    tol: &Tolerances,
) -> Result<WitnessReport> {
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "witness is {} x {}, expected {n} x {n}",
            g.nrows(),
            g.ncols()
        )));
    }
    if linalg::max_asymmetry(g) > 1e-12 {
        return Err(Error::InvalidArgument("witness must be symmetric".into()));
    }
    let pset = patterns_for(n, d)?;
    let per_pattern_min: Vec<f64> = pset
        .iter()
        .map(|p| {
            let pm = p.to_dmatrix();
            linalg::min_eigenvalue(&linalg::symmetrize(&(pm.transpose() * g * &pm)))
        })
        .collect();
    let (vals, vecs) = linalg::sym_eigen(g);
    let min_eigenvalue = vals[0];
    let blocks_ok = per_pattern_min
        .iter()
        .all(|&v| v >= -tol.witness_margin);
    let valid = min_eigenvalue < 0.0 && blocks_ok;
    let violating_example = if valid && with_example {
        // the most negative eigendirection gives a PSD matrix with
        // tr(G gamma') < 0; any PSD matrix is attainable with n+1 values
        let v = vecs.column(0);
        let outer = &v * v.transpose();
        Some(crate::certificate::matrix_to_rows(&outer))
    } else {
        None
    };
    Ok(WitnessReport {
        valid,
        min_eigenvalue,
        per_pattern_min,
        violating_example,
    })
}

/// The binary-weight witness matrix
/// `B = (1 - 3/(n(4^n - 1))) I - (3/(4^n - 1)) v v^T` with `v_i = 2^{i-1}`;
/// `tr(B gamma) >= 0` for every matrix attainable with `n` identical
/// n-valued variables.
pub fn identity_witness_b(n: usize) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "binary-weight witness needs n >= 2".into(),
        ));
    }
    let pow = 4f64.powi(n as i32) - 1.0;
    let diag = 1.0 - 3.0 / (n as f64 * pow);
    let coef = 3.0 / pow;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let vij = 2f64.powi(i as i32) * 2f64.powi(j as i32);
        let d = if i == j { diag } else { 0.0 };
        d - coef * vij
    }))
}

/// Scalar evaluation `tr(B gamma)` of the binary-weight witness.
pub fn identity_witness_value(gamma: &CovMatrix) -> Result<f64> {
    let b = identity_witness_b(gamma.n())?;
    Ok(gamma.inner(&b))
}

/// Closed form and solver cross-check of the witness ratio
/// `K = 1 - 3/(n(4^n - 1))`: the maximum of `tr(G gamma)` over the trace-1
/// slice of the n-level cone, with `G_ij = 2^{i+j-2} * 3/(4^n - 1)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KRatio {
    pub closed_form: f64,
    pub solver_value: f64,
    /// Agreement within `1e-6`; a disagreement flags a solver defect.
    pub agree: bool,
}

pub fn k_ratio(n: usize) -> Result<KRatio> {
    if n < 2 {
        return Err(Error::InvalidArgument("witness ratio needs n >= 2".into()));
    }
    let pow = 4f64.powi(n as i32) - 1.0;
    let closed_form = 1.0 - 3.0 / (n as f64 * pow);
    let g = DMatrix::from_fn(n, n, |i, j| 2f64.powi((i + j) as i32) * 3.0 / pow);
    let pset = patterns_for(n, n)?;
    let solver_value = sdp_linear_opt(&g, &pset)?.value;
    Ok(KRatio {
        closed_form,
        solver_value,
        agree: (closed_form - solver_value).abs() <= 1e-6,
    })
}

/// Continuum bound for the kernel `G(t, u) = 3 t u`: with
/// `d_bar = d(d-1)/2 + 1` intervals the best approximation ratio is
/// `1 - 1/(4 d_bar^2)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContinuumBound {
    pub d_bar: usize,
    pub bound: f64,
}

pub fn continuum_step_bound(d: usize) -> Result<ContinuumBound> {
    if d < 1 {
        return Err(Error::InvalidArgument("continuum bound needs d >= 1".into()));
    }
    let d_bar = d * (d - 1) / 2 + 1;
    let b = 2.0 * d_bar as f64;
    Ok(ContinuumBound {
        d_bar,
        bound: 1.0 - 1.0 / (b * b),
    })
}
