//! Outcome-value spectra of microscopic variables.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Record of how a nominally infinite outcome family was materialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Family name, e.g. `"geometric"` or `"power"`.
    pub family: String,
    /// Family parameter (geometric ratio, power exponent), when meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
    /// First index actually materialized.
    pub lo: i64,
    /// Last index actually materialized.
    pub hi: i64,
}

/// Per-site outcome values of an n-tuple of finitely-valued variables.
///
/// Site `k` holds the `d_k` values its variable can take, sorted strictly
/// ascending. Outcomes are labelled `1..=d_k`, so the value of outcome `a`
/// at site `k` is `sites[k][a - 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumJson", into = "SpectrumJson")]
pub struct Spectrum {
    sites: Vec<Vec<f64>>,
    identical: bool,
    truncation: Option<Truncation>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    sites: Vec<Vec<f64>>,
    #[serde(default)]
    identical: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truncation: Option<Truncation>,
}

impl TryFrom<SpectrumJson> for Spectrum {
    type Error = Error;

    fn try_from(j: SpectrumJson) -> Result<Self> {
        let s = Spectrum::new(j.sites)?.with_truncation(j.truncation);
        if j.identical && !s.identical {
            return Err(Error::InvalidSpectrum(
                "identical=true but site value lists differ".into(),
            ));
        }
        Ok(s)
    }
}

impl From<Spectrum> for SpectrumJson {
    fn from(s: Spectrum) -> Self {
        SpectrumJson {
            sites: s.sites,
            identical: s.identical,
            truncation: s.truncation,
        }
    }
}

impl Spectrum {
    /// Builds a spectrum from per-site value lists, validating that every
    /// list is non-empty, finite, strictly ascending and duplicate-free.
    pub fn new(sites: Vec<Vec<f64>>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidSpectrum("no sites".into()));
        }
        for (k, vals) in sites.iter().enumerate() {
            if vals.is_empty() {
                return Err(Error::InvalidSpectrum(format!("site {k} has no values")));
            }
            for v in vals {
                if !v.is_finite() {
                    return Err(Error::InvalidSpectrum(format!(
                        "site {k} holds a non-finite value {v}"
                    )));
                }
            }
            for w in vals.windows(2) {
                if w[1] <= w[0] {
                    return Err(Error::InvalidSpectrum(format!(
                        "site {k} values must be strictly ascending, got {} then {}",
                        w[0], w[1]
                    )));
                }
            }
        }
        let identical = sites.windows(2).all(|w| w[0] == w[1]);
        Ok(Self {
            sites,
            identical,
            truncation: None,
        })
    }

    /// Every site carries the same value list.
    pub fn identical(n_sites: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(vec![values; n_sites.max(1)])
    }

    /// Equally spaced values `1, 2, ..., d` on every site.
    pub fn equally_spaced(n_sites: usize, d: usize) -> Result<Self> {
        Self::identical(n_sites, (1..=d).map(|a| a as f64).collect())
    }

    /// Geometric values `mu^a` for `a` in `lo..=hi` on every site.
    pub fn geometric(n_sites: usize, mu: f64, lo: i64, hi: i64) -> Result<Self> {
        if !(mu > 1.0) {
            return Err(Error::InvalidSpectrum(format!(
                "geometric ratio must exceed 1, got {mu}"
            )));
        }
        if lo > hi {
            return Err(Error::InvalidSpectrum(format!(
                "empty index range {lo}..={hi}"
            )));
        }
        let values: Vec<f64> = (lo..=hi).map(|a| mu.powi(a as i32)).collect();
        Ok(Self::identical(n_sites, values)?.with_truncation(Some(Truncation {
            family: "geometric".into(),
            parameter: Some(mu),
            lo,
            hi,
        })))
    }

    pub fn with_truncation(mut self, truncation: Option<Truncation>) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Number of outcomes at site `k` (0-based site index).
    pub fn dim(&self, k: usize) -> usize {
        self.sites[k].len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.len()).collect()
    }

    /// Value of outcome `a` (1-based label) at site `k` (0-based index).
    pub fn value(&self, k: usize, a: usize) -> Result<f64> {
        let d = self.dim(k);
        if a == 0 || a > d {
            return Err(Error::OutcomeOutOfRange {
                site: k,
                outcome: a,
                dim: d,
            });
        }
        Ok(self.sites[k][a - 1])
    }

    pub fn site(&self, k: usize) -> &[f64] {
        &self.sites[k]
    }

    pub fn sites(&self) -> &[Vec<f64>] {
        &self.sites
    }

    pub fn is_identical(&self) -> bool {
        self.identical
    }

    pub fn truncation(&self) -> Option<&Truncation> {
        self.truncation.as_ref()
    }

    /// A site with a single value contributes identically zero covariance
    /// rows and columns.
    pub fn is_degenerate_site(&self, k: usize) -> bool {
        self.dim(k) == 1
    }

    pub fn all_degenerate(&self) -> bool {
        (0..self.n_sites()).all(|k| self.is_degenerate_site(k))
    }

    /// Affine image `s * value + t` of every outcome value, `s != 0`.
    ///
    /// For `s < 0` the per-site orderings flip; the returned lists are
    /// re-sorted and the accompanying permutations (old 0-based position ->
    /// new 0-based position) are returned so that joint tables can be
    /// relabelled consistently.
    pub fn affine(&self, s: f64, t: f64) -> Result<(Spectrum, Vec<Vec<usize>>)> {
        if s == 0.0 || !s.is_finite() || !t.is_finite() {
            return Err(Error::InvalidValue(format!(
                "affine map needs finite s != 0, got s={s}, t={t}"
            )));
        }
        let mut new_sites = Vec::with_capacity(self.sites.len());
        let mut perms = Vec::with_capacity(self.sites.len());
        for vals in &self.sites {
            let mapped: Vec<f64> = vals.iter().map(|v| s * v + t).collect();
            // ascending order is preserved for s > 0 and reversed for s < 0
            let d = mapped.len();
            let perm: Vec<usize> = if s > 0.0 {
                (0..d).collect()
            } else {
                (0..d).rev().collect()
            };
            let mut sorted = vec![0.0; d];
            for (old, &new) in perm.iter().enumerate() {
                sorted[new] = mapped[old];
            }
            new_sites.push(sorted);
            perms.push(perm);
        }
        Ok((Spectrum::new(new_sites)?, perms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_disorder() {
        assert!(Spectrum::new(vec![vec![0.0, 0.0]]).is_err());
        assert!(Spectrum::new(vec![vec![1.0, 0.0]]).is_err());
        assert!(Spectrum::new(vec![vec![0.0, 1.0]]).is_ok());
    }

    #[test]
    fn identical_flag_is_computed() {
        let s = Spectrum::new(vec![vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(s.is_identical());
        let s = Spectrum::new(vec![vec![0.0, 1.0], vec![0.0, 2.0]]).unwrap();
        assert!(!s.is_identical());
    }

    #[test]
    fn geometric_materializes_truncation() {
        let s = Spectrum::geometric(2, 5.0, -6, 6).unwrap();
        assert_eq!(s.dim(0), 13);
        let t = s.truncation().unwrap();
        assert_eq!(t.family, "geometric");
        assert_eq!((t.lo, t.hi), (-6, 6));
        assert!((s.value(0, 7).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let s = Spectrum::new(vec![vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let txt = serde_json::to_string(&s).unwrap();
        assert!(txt.contains("\"identical\":true"));
        let back: Spectrum = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn inconsistent_identical_flag_rejected() {
        let txt = r#"{"sites": [[0,1],[0,2]], "identical": true}"#;
        assert!(serde_json::from_str::<Spectrum>(txt).is_err());
    }

    #[test]
    fn affine_negative_scale_reverses() {
        let s = Spectrum::new(vec![vec![0.0, 1.0, 3.0]]).unwrap();
        let (mapped, perms) = s.affine(-2.0, 1.0).unwrap();
        assert_eq!(mapped.site(0), &[-5.0, -1.0, 1.0]);
        assert_eq!(perms[0], vec![2, 1, 0]);
    }
}
