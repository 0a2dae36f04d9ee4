//! Naked covariance matrices and the rank-1 generators obtained by dressing
//! them with outcome values.
//!
//! A *naked* detector counts, per site, how many particles landed in each
//! state; the covariance of those counts is an `nd x nd` matrix indexed by
//! `(site, state)` pairs. Dressing a naked matrix with outcome values
//! `v^i_a` collapses it to the ordinary `n x n` covariance
//! `gamma_ij = sum_ab v^i_a v^j_b Gamma^{ab}_{ij}`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, JointTable, Result, Spectrum};

/// Covariance matrix of per-(site, state) counters, `nd x nd`.
///
/// Row/column `(i, a)` maps to index `i * d + (a - 1)` with `i` a 0-based
/// site and `a` a 1-based state label.
#[derive(Debug, Clone, PartialEq)]
pub struct NakedCov {
    n: usize,
    d: usize,
    mat: DMatrix<f64>,
}

impl NakedCov {
    pub fn zeros(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            mat: DMatrix::zeros(n * d, n * d),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    fn idx(&self, site: usize, state: usize) -> usize {
        debug_assert!(state >= 1 && state <= self.d);
        site * self.d + (state - 1)
    }

    /// Entry `Gamma^{a,b}_{i,j}` (sites 0-based, states 1-based).
    pub fn get(&self, i: usize, a: usize, j: usize, b: usize) -> f64 {
        self.mat[(self.idx(i, a), self.idx(j, b))]
    }

    /// Dresses the naked matrix with per-site outcome values:
    /// `gamma_ij = sum_ab v^i_a v^j_b Gamma^{ab}_{ij}`.
    pub fn dress(&self, values: &Spectrum) -> Result<crate::CovMatrix> {
        if values.n_sites() != self.n || values.dims().iter().any(|&dk| dk != self.d) {
            return Err(Error::DimensionMismatch(format!(
                "spectrum dims {:?} do not match naked covariance ({} sites, {} states)",
                values.dims(),
                self.n,
                self.d
            )));
        }
        let mut gamma = crate::CovMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in i..self.n {
                let mut s = 0.0;
                for a in 1..=self.d {
                    for b in 1..=self.d {
                        s += values.value(i, a)? * values.value(j, b)? * self.get(i, a, j, b);
                    }
                }
                gamma.set(i, j, s);
            }
        }
        Ok(gamma)
    }
}

/// Naked covariance of a joint distribution:
/// `Gamma^{ab}_{ij} = p_ij(a,b) - p_i(a) p_j(b)`, with the diagonal blocks
/// using `p_ii(a,a') = delta_{aa'} p_i(a)`.
///
/// Requires every site to carry the same number of states.
pub fn naked_covariance(joint: &JointTable) -> Result<NakedCov> {
    let n = joint.n_sites();
    let d = joint.dims()[0];
    if joint.dims().iter().any(|&dk| dk != d) {
        return Err(Error::DimensionMismatch(format!(
            "naked covariance needs uniform state counts, got {:?}",
            joint.dims()
        )));
    }
    let mut marg = vec![vec![0.0; d]; n];
    let mut pair = vec![vec![0.0; d * d]; n * (n.saturating_sub(1)) / 2];
    let pair_slot = |i: usize, j: usize| -> usize {
        // i < j
        i * n - i * (i + 1) / 2 + (j - i - 1)
    };
    for (outcome, p) in joint.iter() {
        if p == 0.0 {
            continue;
        }
        for i in 0..n {
            marg[i][outcome[i] - 1] += p;
            for j in (i + 1)..n {
                pair[pair_slot(i, j)][(outcome[i] - 1) * d + (outcome[j] - 1)] += p;
            }
        }
    }
    let mut naked = NakedCov::zeros(n, d);
    for i in 0..n {
        for a in 1..=d {
            for b in 1..=d {
                let diag = if a == b { marg[i][a - 1] } else { 0.0 };
                let v = diag - marg[i][a - 1] * marg[i][b - 1];
                let (ra, rb) = (naked.idx(i, a), naked.idx(i, b));
                naked.mat[(ra, rb)] = v;
            }
        }
        for j in (i + 1)..n {
            for a in 1..=d {
                for b in 1..=d {
                    let v = pair[pair_slot(i, j)][(a - 1) * d + (b - 1)]
                        - marg[i][a - 1] * marg[j][b - 1];
                    let (ra, rb) = (naked.idx(i, a), naked.idx(j, b));
                    naked.mat[(ra, rb)] = v;
                    naked.mat[(rb, ra)] = v;
                }
            }
        }
    }
    Ok(naked)
}

fn check_outcomes(c: &[usize], n: usize, d: usize) -> Result<()> {
    if c.len() != n {
        return Err(Error::SiteCountMismatch {
            expected: n,
            got: c.len(),
        });
    }
    for (k, &a) in c.iter().enumerate() {
        if a == 0 || a > d {
            return Err(Error::OutcomeOutOfRange {
                site: k,
                outcome: a,
                dim: d,
            });
        }
    }
    Ok(())
}

/// Closed-form naked covariance of the equal mixture of the two point masses
/// at `c` and `c_prime`:
/// `Gamma^{ab}_{ij} = 1/2 [d(c_i,a) d(c_j,b) + d(c'_i,a) d(c'_j,b)]
///  - 1/4 [d(c_i,a) + d(c'_i,a)] [d(c_j,b) + d(c'_j,b)]`.
pub fn naked_generator(c: &[usize], c_prime: &[usize], n: usize, d: usize) -> Result<NakedCov> {
    check_outcomes(c, n, d)?;
    check_outcomes(c_prime, n, d)?;
    let delta = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    let mut naked = NakedCov::zeros(n, d);
    for i in 0..n {
        for j in 0..n {
            for a in 1..=d {
                for b in 1..=d {
                    let v = 0.5 * (delta(c[i], a) * delta(c[j], b)
                        + delta(c_prime[i], a) * delta(c_prime[j], b))
                        - 0.25
                            * (delta(c[i], a) + delta(c_prime[i], a))
                            * (delta(c[j], b) + delta(c_prime[j], b));
                    let (ra, rb) = (naked.idx(i, a), naked.idx(j, b));
                    naked.mat[(ra, rb)] = v;
                }
            }
        }
    }
    Ok(naked)
}

/// Per-site outcome-value differences `w_i = v^i_{c_i} - v^i_{c'_i}`.
///
/// The dressed cone generator associated with the pair `(c, c')` is the
/// rank-1 matrix `w w^T`.
pub fn dressed_generator(spectrum: &Spectrum, c: &[usize], c_prime: &[usize]) -> Result<DVector<f64>> {
    let n = spectrum.n_sites();
    if c.len() != n || c_prime.len() != n {
        return Err(Error::SiteCountMismatch {
            expected: n,
            got: c.len().min(c_prime.len()),
        });
    }
    let mut w = DVector::zeros(n);
    for i in 0..n {
        w[i] = spectrum.value(i, c[i])? - spectrum.value(i, c_prime[i])?;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_uniform_pair() {
        let joint = JointTable::new(vec![2], vec![0.5, 0.5]).unwrap();
        let naked = naked_covariance(&joint).unwrap();
        assert!((naked.get(0, 1, 0, 1) - 0.25).abs() < 1e-15);
        assert!((naked.get(0, 1, 0, 2) + 0.25).abs() < 1e-15);
        assert!((naked.get(0, 2, 0, 2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn deterministic_joint_is_zero() {
        let joint = JointTable::point_mass(vec![3, 3], &[2, 3]).unwrap();
        let naked = naked_covariance(&joint).unwrap();
        assert!(naked.matrix().norm() < 1e-15);
    }

    #[test]
    fn correlated_cross_block() {
        let joint = JointTable::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let naked = naked_covariance(&joint).unwrap();
        assert!((naked.get(0, 1, 1, 1) - 0.25).abs() < 1e-15);
        assert!((naked.get(0, 1, 1, 2) + 0.25).abs() < 1e-15);
        assert!((naked.get(0, 2, 1, 2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn generator_coincides_with_two_point_covariance() {
        let (n, d) = (2, 3);
        let c = vec![1, 2];
        let cp = vec![3, 3];
        let gen = naked_generator(&c, &cp, n, d).unwrap();
        let joint = JointTable::two_point(vec![d; n], &c, &cp).unwrap();
        let direct = naked_covariance(&joint).unwrap();
        assert!((gen.matrix() - direct.matrix()).norm() < 1e-15);
    }

    #[test]
    fn generator_of_equal_points_is_zero() {
        let gen = naked_generator(&[2, 1], &[2, 1], 2, 2).unwrap();
        assert!(gen.matrix().norm() == 0.0);
    }

    #[test]
    fn dressed_difference_vector() {
        let s = Spectrum::new(vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]]).unwrap();
        let w = dressed_generator(&s, &[3, 1], &[1, 2]).unwrap();
        assert_eq!(w.as_slice(), &[2.0, -1.0]);
    }

    #[test]
    fn dressing_matches_direct_evaluation() {
        // dress the naked covariance of a joint and compare against the
        // covariance evaluated with values in place
        let spectrum = Spectrum::new(vec![vec![-1.0, 2.0], vec![0.5, 1.5]]).unwrap();
        let joint = JointTable::new(vec![2, 2], vec![0.3, 0.2, 0.1, 0.4]).unwrap();
        let naked = naked_covariance(&joint).unwrap();
        let dressed = naked.dress(&spectrum).unwrap();
        let model = crate::MicroModel::unit_nu(vec![crate::MicroTuple::new(
            1.0,
            spectrum,
            joint,
        )
        .unwrap()])
        .unwrap();
        let direct = crate::covariance_of_model(&model).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((dressed.get(i, j) - direct.get(i, j)).abs() < 1e-14);
            }
        }
    }
}
