//! Microscopic models: weighted collections of independent n-tuples of
//! discrete variables, and the exact evaluation of the macroscopic
//! covariance matrix they generate.

use serde::{Deserialize, Serialize};

use crate::{CovMatrix, Error, Result, Spectrum};

/// Dense joint tables are capped at this many cells.
pub const DENSE_CELL_LIMIT: usize = 10_000_000;

const PROB_SUM_TOL: f64 = 1e-12;

/// Full joint probability table over outcome tuples `{1..d_1} x ... x {1..d_n}`,
/// stored row-major (last site index fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointTableJson", into = "JointTableJson")]
pub struct JointTable {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct JointTableJson {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl TryFrom<JointTableJson> for JointTable {
    type Error = Error;
    fn try_from(j: JointTableJson) -> Result<Self> {
        JointTable::new(j.dims, j.probs)
    }
}

impl From<JointTable> for JointTableJson {
    fn from(t: JointTable) -> Self {
        JointTableJson {
            dims: t.dims,
            probs: t.probs,
        }
    }
}

impl JointTable {
    /// Validates non-negativity and normalization (sum within `1e-12` of 1).
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidDistribution(
                "joint table needs at least one site with at least one outcome".into(),
            ));
        }
        let cells = dims.iter().try_fold(1usize, |acc, &d| {
            acc.checked_mul(d).filter(|&c| c <= DENSE_CELL_LIMIT)
        });
        let cells = cells.ok_or(Error::DeskScaleExceeded {
            cells: usize::MAX,
            limit: DENSE_CELL_LIMIT,
        })?;
        if probs.len() != cells {
            return Err(Error::InvalidDistribution(format!(
                "probability array has {} entries, expected {}",
                probs.len(),
                cells
            )));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probabilities must be finite and nonnegative, got {p}"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1 within {PROB_SUM_TOL}"
            )));
        }
        Ok(Self { dims, probs })
    }

    /// Point mass on one outcome tuple (1-based labels).
    pub fn point_mass(dims: Vec<usize>, outcome: &[usize]) -> Result<Self> {
        let mut t = Self::new(dims.clone(), uniform_probs(&dims))?;
        for p in &mut t.probs {
            *p = 0.0;
        }
        let idx = t.linear_index(outcome)?;
        t.probs[idx] = 1.0;
        Ok(t)
    }

    /// Equal mixture of two point masses (the two-point distribution behind
    /// every naked generator).
    pub fn two_point(dims: Vec<usize>, c: &[usize], c_prime: &[usize]) -> Result<Self> {
        let mut t = Self::new(dims.clone(), uniform_probs(&dims))?;
        for p in &mut t.probs {
            *p = 0.0;
        }
        let i = t.linear_index(c)?;
        let j = t.linear_index(c_prime)?;
        t.probs[i] += 0.5;
        t.probs[j] += 0.5;
        Ok(t)
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cells(&self) -> usize {
        self.probs.len()
    }

    /// Linear index of a 1-based outcome tuple.
    pub fn linear_index(&self, outcome: &[usize]) -> Result<usize> {
        if outcome.len() != self.dims.len() {
            return Err(Error::SiteCountMismatch {
                expected: self.dims.len(),
                got: outcome.len(),
            });
        }
        let mut idx = 0usize;
        for (k, (&a, &d)) in outcome.iter().zip(&self.dims).enumerate() {
            if a == 0 || a > d {
                return Err(Error::OutcomeOutOfRange {
                    site: k,
                    outcome: a,
                    dim: d,
                });
            }
            idx = idx * d + (a - 1);
        }
        Ok(idx)
    }

    /// Decodes a linear index into 1-based outcome labels.
    pub fn outcome_at(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = idx % self.dims[k] + 1;
            idx /= self.dims[k];
        }
        out
    }

    /// Iterates `(outcome labels, probability)` over all cells.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(idx, &p)| (self.outcome_at(idx), p))
    }

    /// Marginal distribution of site `k` (0-based), indexed by outcome - 1.
    pub fn marginal(&self, k: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.dims[k]];
        for (outcome, p) in self.iter() {
            m[outcome[k] - 1] += p;
        }
        m
    }

    /// Applies per-site relabellings of the outcomes; `perms[k][old]` is the
    /// new 0-based position of old position `old` at site `k`.
    pub fn relabel(&self, perms: &[Vec<usize>]) -> Result<Self> {
        if perms.len() != self.dims.len() {
            return Err(Error::SiteCountMismatch {
                expected: self.dims.len(),
                got: perms.len(),
            });
        }
        let mut probs = vec![0.0; self.probs.len()];
        for (idx, &p) in self.probs.iter().enumerate() {
            let old = self.outcome_at(idx);
            let new: Vec<usize> = old
                .iter()
                .enumerate()
                .map(|(k, &a)| perms[k][a - 1] + 1)
                .collect();
            probs[self.linear_index(&new)?] = p;
        }
        Ok(Self {
            dims: self.dims.clone(),
            probs,
        })
    }
}

fn uniform_probs(dims: &[usize]) -> Vec<f64> {
    let cells: usize = dims.iter().product();
    vec![1.0 / cells as f64; cells]
}

/// One species of particle tuples: a count weight, the outcome values of its
/// variables, and their joint distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroTuple {
    pub weight: f64,
    pub spectrum: Spectrum,
    pub joint: JointTable,
}

impl MicroTuple {
    pub fn new(weight: f64, spectrum: Spectrum, joint: JointTable) -> Result<Self> {
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::InvalidValue(format!(
                "tuple weight must be nonnegative and finite, got {weight}"
            )));
        }
        if spectrum.dims() != joint.dims() {
            return Err(Error::DimensionMismatch(format!(
                "spectrum dims {:?} do not match joint dims {:?}",
                spectrum.dims(),
                joint.dims()
            )));
        }
        Ok(Self {
            weight,
            spectrum,
            joint,
        })
    }
}

/// A ground-truth generator of macroscopic covariance: several independent
/// tuple species, each present with production probability `nu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MicroModelJson", into = "MicroModelJson")]
pub struct MicroModel {
    tuples: Vec<MicroTuple>,
    nu: f64,
}

#[derive(Serialize, Deserialize)]
struct MicroModelJson {
    #[serde(default = "default_nu")]
    nu: f64,
    tuples: Vec<MicroTuple>,
}

fn default_nu() -> f64 {
    1.0
}

impl TryFrom<MicroModelJson> for MicroModel {
    type Error = Error;
    fn try_from(j: MicroModelJson) -> Result<Self> {
        MicroModel::new(j.tuples, j.nu)
    }
}

impl From<MicroModel> for MicroModelJson {
    fn from(m: MicroModel) -> Self {
        MicroModelJson {
            nu: m.nu,
            tuples: m.tuples,
        }
    }
}

impl MicroModel {
    pub fn new(tuples: Vec<MicroTuple>, nu: f64) -> Result<Self> {
        if tuples.is_empty() {
            return Err(Error::InvalidValue("model has no tuples".into()));
        }
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::InvalidValue(format!(
                "production probability nu must lie in (0, 1], got {nu}"
            )));
        }
        let n = tuples[0].spectrum.n_sites();
        for t in &tuples {
            if t.spectrum.n_sites() != n {
                return Err(Error::SiteCountMismatch {
                    expected: n,
                    got: t.spectrum.n_sites(),
                });
            }
        }
        Ok(Self { tuples, nu })
    }

    pub fn unit_nu(tuples: Vec<MicroTuple>) -> Result<Self> {
        Self::new(tuples, 1.0)
    }

    pub fn n_sites(&self) -> usize {
        self.tuples[0].spectrum.n_sites()
    }

    pub fn tuples(&self) -> &[MicroTuple] {
        &self.tuples
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Rescales every outcome value to `s * value + t`, relabelling states
    /// where a negative `s` flips per-site orderings. The generated
    /// covariance transforms as `gamma -> s^2 * gamma`.
    pub fn affine_values(&self, s: f64, t: f64) -> Result<Self> {
        let tuples = self
            .tuples
            .iter()
            .map(|tp| {
                let (spectrum, perms) = tp.spectrum.affine(s, t)?;
                let joint = tp.joint.relabel(&perms)?;
                MicroTuple::new(tp.weight, spectrum, joint)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(tuples, self.nu)
    }
}

/// Macroscopic covariance generated by a microscopic model:
/// `gamma_ij = sum_l N_l [ nu <x_i x_j>_l - nu^2 <x_i>_l <x_j>_l ]`,
/// with the diagonal second moment `<x_i x_i>` read as `sum_a p_i(a) v_a^2`.
pub fn covariance_of_model(model: &MicroModel) -> Result<CovMatrix> {
    let n = model.n_sites();
    let nu = model.nu();
    let mut gamma = CovMatrix::zeros(n);
    let mut vals = vec![0.0; n];
    for tuple in model.tuples() {
        let mut first = vec![0.0; n];
        let mut second = CovMatrix::zeros(n);
        for (outcome, p) in tuple.joint.iter() {
            if p == 0.0 {
                continue;
            }
            for k in 0..n {
                vals[k] = tuple.spectrum.value(k, outcome[k])?;
            }
            for i in 0..n {
                first[i] += p * vals[i];
                for j in i..n {
                    second.add_assign(i, j, p * vals[i] * vals[j]);
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                let c = nu * second.get(i, j) - nu * nu * first[i] * first[j];
                gamma.add_assign(i, j, tuple.weight * c);
            }
        }
    }
    Ok(gamma)
}
