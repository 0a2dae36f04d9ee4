//! Linear-programming membership and linear optimization over cones spanned
//! by finitely many rank-1 generators.

use nalgebra::{DMatrix, DVector};

use covcone_core::{CovMatrix, Tolerances};

use crate::certificate::{matrix_to_rows, CoefEntry, ConicCertificate};
use crate::error::{Error, IndeterminateReport, Result};
use crate::generators::GeneratorSet;
use crate::simplex::{nonneg_combination, LpOutcome};

/// Phase-1 objective below which the combination is accepted as feasible
/// (the target is pre-scaled to unit Frobenius norm).
const FEAS_TOL: f64 = 1e-10;

fn upper_indices(n: usize) -> Vec<(usize, usize)> {
    let mut idx = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            idx.push((i, j));
        }
    }
    idx
}

/// Decides whether `gamma` lies in `cone{w_k w_k^T}` over the generator set.
///
/// MEMBER certificates carry the nonnegative coefficients and reconstruct
/// `gamma` within tolerance; NOT_MEMBER certificates carry the normalized
/// separating witness read off the LP dual. A verdict that cannot be
/// certified either way at the configured tolerances is returned as the
/// `Indeterminate` error, never silently rounded.
pub fn cone_membership_lp(
    gamma: &CovMatrix,
    gens: &GeneratorSet,
    tol: &Tolerances,
) -> Result<ConicCertificate> {
    let n = gamma.n();
    if gens.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "generators over R^{} against a {n} x {n} target",
            gens.n()
        )));
    }
    let norm = gamma.frobenius_norm();
    if norm == 0.0 {
        return Ok(ConicCertificate::Member {
            coefficients: Vec::new(),
            residual: 0.0,
            tolerances: *tol,
        });
    }
    if gens.is_empty() {
        // the only separating direction needed is -gamma itself
        let g = -gamma.to_dmatrix() / norm;
        let trace = gamma.inner(&g);
        if trace <= -tol.witness_margin {
            return Ok(ConicCertificate::NotMember {
                witness: matrix_to_rows(&g),
                trace_margin: trace,
                min_generator_value: None,
                tolerances: *tol,
            });
        }
        return Err(Error::Indeterminate(Box::new(IndeterminateReport {
            witness_trace: Some(trace),
            detail: "empty generator set against a target too small to separate at the witness margin".into(),
            ..Default::default()
        })));
    }

    let idx = upper_indices(n);
    let m = idx.len();
    let b = DVector::from_fn(m, |r, _| gamma.get(idx[r].0, idx[r].1) / norm);
    let columns: Vec<DVector<f64>> = gens
        .iter()
        .map(|g| DVector::from_fn(m, |r, _| g.w[idx[r].0] * g.w[idx[r].1]))
        .collect();
    let max_iters = 60 * (columns.len() + m) + 500;

    match nonneg_combination(&columns, &b, FEAS_TOL, max_iters) {
        Ok(LpOutcome::Feasible { x }) => {
            let coefficients: Vec<CoefEntry> = x
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(|(k, &v)| CoefEntry {
                    generator: k,
                    coefficient: v * norm,
                })
                .collect();
            let mut recon = DMatrix::<f64>::zeros(n, n);
            for e in &coefficients {
                recon += gens.get(e.generator).outer() * e.coefficient;
            }
            let residual = (recon - gamma.to_dmatrix()).norm();
            if residual <= tol.member_residual(norm) {
                Ok(ConicCertificate::Member {
                    coefficients,
                    residual,
                    tolerances: *tol,
                })
            } else {
                Err(Error::Indeterminate(Box::new(IndeterminateReport {
                    primal_residual: Some(residual),
                    detail: "feasible combination found but reconstruction residual exceeds the membership tolerance".into(),
                    ..Default::default()
                })))
            }
        }
        Ok(LpOutcome::Infeasible { y, objective }) => {
            // y pairs with matrices through the raw upper-triangle listing,
            // so off-diagonal weights are halved to form the witness
            let mut g_raw = DMatrix::<f64>::zeros(n, n);
            for (r, &(i, j)) in idx.iter().enumerate() {
                if i == j {
                    g_raw[(i, i)] = -y[r];
                } else {
                    g_raw[(i, j)] = -0.5 * y[r];
                    g_raw[(j, i)] = -0.5 * y[r];
                }
            }
            let g_norm = g_raw.norm();
            if g_norm <= 0.0 {
                return Err(Error::NumericalFailure(
                    "infeasible LP returned a zero dual".into(),
                ));
            }
            let g = g_raw / g_norm;
            let trace = gamma.inner(&g);
            let min_gen = gens
                .iter()
                .map(|gen| gen.quad(&g))
                .fold(f64::INFINITY, f64::min);
            if trace <= -tol.witness_margin && min_gen >= -tol.witness_margin {
                Ok(ConicCertificate::NotMember {
                    witness: matrix_to_rows(&g),
                    trace_margin: trace,
                    min_generator_value: Some(min_gen),
                    tolerances: *tol,
                })
            } else {
                Err(Error::Indeterminate(Box::new(IndeterminateReport {
                    primal_residual: Some(objective * norm),
                    witness_trace: Some(trace),
                    witness_min_value: Some(min_gen),
                    detail: "dual solution does not meet the witness margins".into(),
                })))
            }
        }
        Err(stall) => Err(Error::Indeterminate(Box::new(IndeterminateReport {
            primal_residual: Some(stall.objective * norm),
            detail: format!(
                "simplex stalled after {} iterations without certifying either side",
                stall.iterations
            ),
            ..Default::default()
        }))),
    }
}

/// Maximizes `tr(A gamma)` over the trace-1 slice of the cone. Since the
/// slice is the convex hull of the normalized generators, the optimum is
/// `max_k w_k^T A w_k` over unit directions; returns the value and the index
/// of an attaining generator.
pub fn cone_linear_opt(objective: &DMatrix<f64>, gens: &GeneratorSet) -> Result<(f64, usize)> {
    if gens.is_empty() {
        return Err(Error::EmptyGeneratorSet);
    }
    if objective.nrows() != gens.n() || objective.ncols() != gens.n() {
        return Err(Error::DimensionMismatch(format!(
            "objective is {} x {}, generators live in R^{}",
            objective.nrows(),
            objective.ncols(),
            gens.n()
        )));
    }
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (k, g) in gens.iter().enumerate() {
        let v = g.quad(objective);
        if v > best.0 {
            best = (v, k);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify_conic_certificate;
    use crate::generators::Provenance;

    fn dichotomic_gens() -> GeneratorSet {
        // difference directions of the two-valued spectrum {0,1} on two sites
        let raw = [
            [1.0, 0.0],
            [0.0, 1.0],
            [1.0, 1.0],
            [1.0, -1.0],
        ]
        .iter()
        .map(|v| (DVector::from_row_slice(v), Provenance::Adhoc))
        .collect();
        GeneratorSet::new(2, raw).unwrap()
    }

    #[test]
    fn zero_matrix_is_member_with_zero_coefficients() {
        let gens = dichotomic_gens();
        let cert =
            cone_membership_lp(&CovMatrix::zeros(2), &gens, &Tolerances::default()).unwrap();
        match &cert {
            ConicCertificate::Member { coefficients, .. } => assert!(coefficients.is_empty()),
            _ => panic!("expected member"),
        }
    }

    #[test]
    fn steep_correlation_is_rejected_with_witness() {
        // gamma_xx = 1/r, gamma_xy = 1, gamma_yy = r + eps with r = 2
        let gamma = CovMatrix::from_rows(&[vec![0.5, 1.0], vec![1.0, 2.1]]).unwrap();
        let gens = dichotomic_gens();
        let tol = Tolerances::default();
        let cert = cone_membership_lp(&gamma, &gens, &tol).unwrap();
        assert!(!cert.is_member());
        verify_conic_certificate(&cert, &gamma, &gens).unwrap();
    }

    #[test]
    fn correlated_plus_diagonal_is_member() {
        let gamma = CovMatrix::from_rows(&[vec![1.3, 1.0], vec![1.0, 1.7]]).unwrap();
        let gens = dichotomic_gens();
        let tol = Tolerances::default();
        let cert = cone_membership_lp(&gamma, &gens, &tol).unwrap();
        assert!(cert.is_member());
        verify_conic_certificate(&cert, &gamma, &gens).unwrap();
    }

    #[test]
    fn empty_generators_separate_with_negated_target() {
        let gamma = CovMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let gens = GeneratorSet::empty(2);
        let cert = cone_membership_lp(&gamma, &gens, &Tolerances::default()).unwrap();
        match &cert {
            ConicCertificate::NotMember {
                trace_margin,
                min_generator_value,
                ..
            } => {
                assert!((*trace_margin + gamma.frobenius_norm()).abs() < 1e-12);
                assert!(min_generator_value.is_none());
            }
            _ => panic!("expected not-member"),
        }
    }

    #[test]
    fn linear_opt_picks_best_direction() {
        let gens = dichotomic_gens();
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        let (v, k) = cone_linear_opt(&a, &gens).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let w = &gens.get(k).w;
        assert!((w[0] - w[1]).abs() < 1e-12, "optimum at the (1,1) direction");
        let id = DMatrix::identity(2, 2);
        let (v, _) = cone_linear_opt(&id, &gens).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }
}
