//! Phase-1 primal simplex for nonnegative-combination feasibility.
//!
//! Decides whether `b` is a nonnegative combination of the given columns.
//! Infeasibility comes with the dual solution, which by LP duality separates
//! `b` from the cone of columns: `y^T a_k <= eps` for every column while
//! `y^T b > 0`.

use nalgebra::{DMatrix, DVector};

/// Entering-candidate threshold on reduced costs (columns are expected to be
/// normalized to unit scale).
const REDUCED_COST_TOL: f64 = 1e-11;
/// Pivot threshold in the ratio test.
const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug)]
pub enum LpOutcome {
    /// `x >= 0` with `A x = b` up to the phase-1 objective left at optimum.
    Feasible { x: Vec<f64> },
    /// Farkas certificate: `y^T a_k <= eps` for all columns, `y^T b = objective > 0`.
    Infeasible { y: DVector<f64>, objective: f64 },
}

#[derive(Debug)]
pub struct Stalled {
    pub iterations: usize,
    pub objective: f64,
}

/// Runs the phase-1 simplex with Bland's rule (no cycling).
///
/// `columns` are the candidate cone directions in constraint space, `b` the
/// target. Feasibility is declared when the artificial objective drops below
/// `feas_tol`.
pub fn nonneg_combination(
    columns: &[DVector<f64>],
    b: &DVector<f64>,
    feas_tol: f64,
    max_iters: usize,
) -> Result<LpOutcome, Stalled> {
    let m = b.len();
    let k = columns.len();
    // variable layout: 0..k original, k..k+m artificial (column sign(b_i) e_i)
    let art_sign: Vec<f64> = (0..m)
        .map(|i| if b[i] < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let column = |j: usize| -> DVector<f64> {
        if j < k {
            columns[j].clone()
        } else {
            let mut e = DVector::zeros(m);
            e[j - k] = art_sign[j - k];
            e
        }
    };
    let cost = |j: usize| -> f64 {
        if j < k {
            0.0
        } else {
            1.0
        }
    };

    let mut basis: Vec<usize> = (k..k + m).collect();
    let mut iters = 0usize;
    loop {
        let b_mat = DMatrix::from_fn(m, m, |i, c| column(basis[c])[i]);
        let lu = b_mat.clone().lu();
        let lu_t = b_mat.transpose().lu();
        let c_b = DVector::from_fn(m, |i, _| cost(basis[i]));
        let x_b = match lu.solve(b) {
            Some(x) => x,
            None => {
                return Err(Stalled {
                    iterations: iters,
                    objective: f64::NAN,
                })
            }
        };
        let y = match lu_t.solve(&c_b) {
            Some(y) => y,
            None => {
                return Err(Stalled {
                    iterations: iters,
                    objective: f64::NAN,
                })
            }
        };
        let objective = c_b.dot(&x_b);

        // Bland: smallest-index column with negative reduced cost enters
        let mut entering = None;
        for j in 0..k + m {
            if basis.contains(&j) {
                continue;
            }
            let r = cost(j) - y.dot(&column(j));
            if r < -REDUCED_COST_TOL {
                entering = Some(j);
                break;
            }
        }
        let Some(e) = entering else {
            // optimal
            if objective.abs() <= feas_tol {
                let mut x = vec![0.0; k];
                for (pos, &var) in basis.iter().enumerate() {
                    if var < k {
                        x[var] = x_b[pos].max(0.0);
                    }
                }
                return Ok(LpOutcome::Feasible { x });
            }
            return Ok(LpOutcome::Infeasible { y, objective });
        };

        let d = match lu.solve(&column(e)) {
            Some(d) => d,
            None => {
                return Err(Stalled {
                    iterations: iters,
                    objective,
                })
            }
        };
        // ratio test; Bland tie-break on the smallest leaving variable index
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if d[i] > PIVOT_TOL {
                let ratio = (x_b[i].max(0.0)) / d[i];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-15
                            || ((ratio - lr).abs() <= 1e-15 && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((leave_pos, _)) = leave else {
            // phase-1 objective is bounded below; this is a numerical dead end
            return Err(Stalled {
                iterations: iters,
                objective,
            });
        };
        basis[leave_pos] = e;

        iters += 1;
        if iters > max_iters {
            return Err(Stalled {
                iterations: iters,
                objective,
            });
        }
    }
}
