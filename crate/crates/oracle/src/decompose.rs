//! Decomposition of any joint distribution into symmetric two-point atoms.
//!
//! The product `p (x) p` on the doubled outcome space is invariant under the
//! swap of its halves, so it splits into the symmetric atoms
//! `q_{c,c'} = 1/2 delta_c (x) delta_{c'} + 1/2 delta_{c'} (x) delta_c`
//! with weights `p(c) p(c')`. Each atom contributes exactly twice the naked
//! covariance of the corresponding two-point mixture, which reconstructs the
//! naked covariance of the original distribution and exhibits it as a
//! conic combination of generators.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use covcone_core::{naked_generator, Error, JointTable, Result};

/// One symmetric two-point atom over an unordered outcome pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    pub c: Vec<usize>,
    pub c_prime: Vec<usize>,
}

/// Splits `p (x) p` into two-point atoms: weight `p(c)^2` on the diagonal,
/// `2 p(c) p(c')` on unordered pairs. Weights sum to 1; zero-probability
/// atoms are dropped. Ordering is deterministic (row-major cell order).
pub fn symmetrize_decompose(joint: &JointTable) -> Vec<Atom> {
    let probs = joint.probs();
    let mut atoms = Vec::new();
    for i in 0..probs.len() {
        if probs[i] == 0.0 {
            continue;
        }
        for j in i..probs.len() {
            if probs[j] == 0.0 {
                continue;
            }
            let weight = if i == j {
                probs[i] * probs[i]
            } else {
                2.0 * probs[i] * probs[j]
            };
            atoms.push(Atom {
                weight,
                c: joint.outcome_at(i),
                c_prime: joint.outcome_at(j),
            });
        }
    }
    atoms
}

/// Conic reconstruction `sum_atoms weight * 2 * Gamma(c, c')` of the naked
/// covariance encoded by the atoms.
pub fn reconstruct_naked(atoms: &[Atom], n: usize, d: usize) -> Result<DMatrix<f64>> {
    let mut acc = DMatrix::<f64>::zeros(n * d, n * d);
    for a in atoms {
        if a.c.len() != n || a.c_prime.len() != n {
            return Err(Error::SiteCountMismatch {
                expected: n,
                got: a.c.len().min(a.c_prime.len()),
            });
        }
        let gen = naked_generator(&a.c, &a.c_prime, n, d)?;
        acc += gen.matrix() * (2.0 * a.weight);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use covcone_core::naked_covariance;

    #[test]
    fn point_mass_is_one_diagonal_atom() {
        let joint = JointTable::point_mass(vec![3, 3], &[2, 3]).unwrap();
        let atoms = symmetrize_decompose(&joint);
        assert_eq!(atoms.len(), 1);
        assert_eq!(atoms[0].weight, 1.0);
        assert_eq!(atoms[0].c, atoms[0].c_prime);
        let rec = reconstruct_naked(&atoms, 2, 3).unwrap();
        assert!(rec.norm() == 0.0);
    }

    #[test]
    fn uniform_single_site_atoms() {
        let joint = JointTable::new(vec![2], vec![0.5, 0.5]).unwrap();
        let atoms = symmetrize_decompose(&joint);
        assert_eq!(atoms.len(), 3);
        let w: f64 = atoms.iter().map(|a| a.weight).sum();
        assert!((w - 1.0).abs() < 1e-15);
        let diag: Vec<&Atom> = atoms.iter().filter(|a| a.c == a.c_prime).collect();
        assert_eq!(diag.len(), 2);
        assert!(diag.iter().all(|a| (a.weight - 0.25).abs() < 1e-15));
        let rec = reconstruct_naked(&atoms, 1, 2).unwrap();
        let direct = naked_covariance(&joint).unwrap();
        assert!((rec - direct.matrix()).norm() < 1e-15);
    }

    #[test]
    fn random_joints_reconstruct() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let dims = vec![3usize, 3];
            let cells = 9;
            let mut probs: Vec<f64> = (0..cells)
                .map(|_| -(1.0 - rng.random::<f64>()).ln())
                .collect();
            let sum: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= sum);
            let joint = JointTable::new(dims, probs).unwrap();
            let atoms = symmetrize_decompose(&joint);
            let w: f64 = atoms.iter().map(|a| a.weight).sum();
            assert!((w - 1.0).abs() < 1e-12);
            let rec = reconstruct_naked(&atoms, 2, 3).unwrap();
            let direct = naked_covariance(&joint).unwrap();
            assert!((rec - direct.matrix()).norm() < 1e-10);
        }
    }
}
