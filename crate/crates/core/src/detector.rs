//! Reduction of probabilistic detectors to deterministic ones.
//!
//! A probabilistic detector responds to a particle in state `a` with a
//! random signal drawn from a distribution with mean `<v>_a` and second
//! moment `<v^2>_a`. At the level of covariance matrices this is equivalent
//! to the deterministic detector `a -> <v>_a` plus a diagonal noise term.

use serde::{Deserialize, Serialize};

use crate::{covariance_of_model, CovMatrix, Error, MicroModel, MicroTuple, Result, Spectrum};

/// First and second moment of one detector response distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseMoments {
    pub mean: f64,
    pub second_moment: f64,
}

impl ResponseMoments {
    /// Deterministic response of fixed strength.
    pub fn deterministic(value: f64) -> Self {
        Self {
            mean: value,
            second_moment: value * value,
        }
    }

    pub fn variance(&self) -> f64 {
        self.second_moment - self.mean * self.mean
    }
}

/// Per-site, per-state response moments of a bank of detectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorBank {
    sites: Vec<Vec<ResponseMoments>>,
}

impl DetectorBank {
    /// Validates `<v^2>_a >= <v>_a^2` for every (site, state).
    pub fn new(sites: Vec<Vec<ResponseMoments>>) -> Result<Self> {
        if sites.is_empty() || sites.iter().any(|s| s.is_empty()) {
            return Err(Error::InvalidValue(
                "detector bank needs at least one state per site".into(),
            ));
        }
        for (k, states) in sites.iter().enumerate() {
            for (a, m) in states.iter().enumerate() {
                if !m.mean.is_finite() || !m.second_moment.is_finite() {
                    return Err(Error::InvalidValue(format!(
                        "non-finite response moment at site {k}, state {}",
                        a + 1
                    )));
                }
                if m.second_moment < m.mean * m.mean {
                    return Err(Error::MomentInequality {
                        site: k,
                        state: a + 1,
                        second: m.second_moment,
                        mean_sq: m.mean * m.mean,
                    });
                }
            }
        }
        Ok(Self { sites })
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.len()).collect()
    }

    /// Moments at site `k` (0-based), state `a` (1-based).
    pub fn moments(&self, k: usize, a: usize) -> ResponseMoments {
        self.sites[k][a - 1]
    }
}

/// Output of [`detector_reduction`].
#[derive(Debug, Clone)]
pub struct DetectorReduction {
    /// Deterministic outcome values (the response means, sorted per site).
    pub spectrum: Spectrum,
    /// Diagonal noise: `K_i = nu sum_l N_l sum_a p^l_i(a) Var(v)^i_a`.
    pub noise: Vec<f64>,
    /// The model re-expressed over the deterministic spectrum, with states
    /// relabelled so per-site values ascend.
    pub model: MicroModel,
}

impl DetectorReduction {
    /// Covariance of the deterministic model.
    pub fn deterministic_covariance(&self) -> Result<CovMatrix> {
        covariance_of_model(&self.model)
    }

    /// Deterministic covariance plus the diagonal noise: equals the
    /// covariance produced by the probabilistic detectors.
    pub fn probabilistic_covariance(&self) -> Result<CovMatrix> {
        let mut gamma = self.deterministic_covariance()?;
        for (i, k) in self.noise.iter().enumerate() {
            gamma.add_assign(i, i, *k);
        }
        Ok(gamma)
    }
}

/// Replaces each probabilistic detector by the deterministic detector
/// `a -> <v>^k_a` and returns the spectrum, the diagonal noise vector `K`
/// and the relabelled model, so that
/// `gamma_probabilistic = gamma_deterministic + diag(K)` with `K >= 0`.
///
/// The model supplies the joint state distributions and weights; the tuple
/// spectra it carries are superseded by the bank. Response means must be
/// distinct within each site so that they form a valid spectrum.
pub fn detector_reduction(bank: &DetectorBank, model: &MicroModel) -> Result<DetectorReduction> {
    let n = bank.n_sites();
    if model.n_sites() != n {
        return Err(Error::SiteCountMismatch {
            expected: n,
            got: model.n_sites(),
        });
    }
    let dims = bank.dims();
    for t in model.tuples() {
        if t.joint.dims() != dims.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "tuple joint dims {:?} do not match detector bank dims {:?}",
                t.joint.dims(),
                dims
            )));
        }
    }

    // sort per-site means ascending; perms[k][old_state_pos] = new position
    let mut site_values: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(n);
    for k in 0..n {
        let means: Vec<f64> = (1..=dims[k]).map(|a| bank.moments(k, a).mean).collect();
        let mut order: Vec<usize> = (0..dims[k]).collect();
        order.sort_by(|&x, &y| means[x].total_cmp(&means[y]));
        let mut perm = vec![0usize; dims[k]];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        let sorted: Vec<f64> = order.iter().map(|&o| means[o]).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpectrum(format!(
                "response means at site {k} are not distinct; the deterministic spectrum is ill-defined"
            )));
        }
        site_values.push(sorted);
        perms.push(perm);
    }
    let spectrum = Spectrum::new(site_values)?;

    let nu = model.nu();
    let mut noise = vec![0.0; n];
    let mut tuples = Vec::with_capacity(model.tuples().len());
    for t in model.tuples() {
        for (i, k) in noise.iter_mut().enumerate() {
            let marg = t.joint.marginal(i);
            let site_noise: f64 = marg
                .iter()
                .enumerate()
                .map(|(a0, &p)| p * bank.moments(i, a0 + 1).variance())
                .sum();
            *k += nu * t.weight * site_noise;
        }
        tuples.push(MicroTuple::new(
            t.weight,
            spectrum.clone(),
            t.joint.relabel(&perms)?,
        )?);
    }
    let model = MicroModel::new(tuples, nu)?;
    Ok(DetectorReduction {
        spectrum,
        noise,
        model,
    })
}
