//! Canonicalized direction sets spanning polyhedral covariance cones.
//!
//! The cone of covariance matrices attainable with a fixed outcome structure
//! is spanned by rank-1 matrices `w w^T`. Since the cone is free of scale and
//! sign, directions are stored canonicalized: Euclidean norm 1, first entry
//! of magnitude above `DEDUP_TOL` positive.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two canonical directions closer than this (entry-wise) are considered the
/// same generator.
pub const DEDUP_TOL: f64 = 1e-12;

/// Where a generator direction came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Outcome-value difference vector of the pair `(c, c')`, 1-based labels.
    Difference { c: Vec<usize>, c_prime: Vec<usize> },
    /// Outcome-value vector of the tuple `c` (variable-production regime).
    Value { c: Vec<usize> },
    /// Supplied directly by the caller.
    Adhoc,
}

#[derive(Debug, Clone)]
pub struct Generator {
    /// Canonical unit direction; the cone generator is `w w^T`.
    pub w: DVector<f64>,
    pub provenance: Provenance,
}

impl Generator {
    /// `w^T A w` for the canonical (unit norm) direction; this is
    /// `tr(A gamma)` of the trace-1 slice point `gamma = w w^T`.
    pub fn quad(&self, a: &DMatrix<f64>) -> f64 {
        (self.w.transpose() * a * &self.w)[(0, 0)]
    }

    /// Dense rank-1 matrix `w w^T`.
    pub fn outer(&self) -> DMatrix<f64> {
        &self.w * self.w.transpose()
    }
}

/// Normalizes a direction: unit Euclidean norm, first significant entry
/// positive. Returns `None` for (numerically) zero vectors.
pub fn canonical_direction(w: &DVector<f64>) -> Option<DVector<f64>> {
    let norm = w.norm();
    if norm <= 1e-300 {
        return None;
    }
    let mut unit = w / norm;
    let lead = unit.iter().find(|x| x.abs() > DEDUP_TOL)?;
    if *lead < 0.0 {
        unit = -unit;
    }
    Some(unit)
}

/// A deduplicated set of canonical cone directions.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    n: usize,
    generators: Vec<Generator>,
}

impl GeneratorSet {
    /// Canonicalizes, drops zero directions and deduplicates within
    /// [`DEDUP_TOL`]; the first provenance wins on collision.
    pub fn new(n: usize, raw: Vec<(DVector<f64>, Provenance)>) -> Result<Self> {
        let mut gens: Vec<Generator> = Vec::with_capacity(raw.len());
        for (w, provenance) in raw {
            if w.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "generator of length {} in a set over R^{n}",
                    w.len()
                )));
            }
            if let Some(unit) = canonical_direction(&w) {
                gens.push(Generator {
                    w: unit,
                    provenance,
                });
            }
        }
        // lexicographic sort brings near-duplicates next to each other
        let mut order: Vec<usize> = (0..gens.len()).collect();
        order.sort_by(|&a, &b| {
            let (wa, wb) = (&gens[a].w, &gens[b].w);
            for i in 0..n {
                match wa[i].total_cmp(&wb[i]) {
                    std::cmp::Ordering::Equal => continue,
                    o => return o,
                }
            }
            a.cmp(&b) // stable: earlier provenance first
        });
        let mut kept: Vec<Generator> = Vec::with_capacity(gens.len());
        for idx in order {
            let g = &gens[idx];
            let dup = kept.last().map_or(false, |last: &Generator| {
                (0..n).all(|i| (last.w[i] - g.w[i]).abs() <= DEDUP_TOL)
            });
            if !dup {
                kept.push(g.clone());
            }
        }
        Ok(Self {
            n,
            generators: kept,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            generators: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Generator> {
        self.generators.iter()
    }

    pub fn get(&self, k: usize) -> &Generator {
        &self.generators[k]
    }
}
