//! Symmetric covariance matrices with exact-by-construction symmetry.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{linalg, Error, Result};

/// Largest absolute entry-wise asymmetry accepted on load before the matrix
/// is symmetrized.
pub const ASYMMETRY_TOL: f64 = 1e-12;

/// An n x n real symmetric matrix; only the upper triangle is stored, so
/// symmetry is exact by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CovMatrixJson", into = "CovMatrixJson")]
pub struct CovMatrix {
    n: usize,
    upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CovMatrixJson {
    n: usize,
    data: Vec<Vec<f64>>,
}

impl TryFrom<CovMatrixJson> for CovMatrix {
    type Error = Error;

    fn try_from(j: CovMatrixJson) -> Result<Self> {
        if j.data.len() != j.n || j.data.iter().any(|r| r.len() != j.n) {
            return Err(Error::DimensionMismatch(format!(
                "`data` must be a full {n} x {n} matrix",
                n = j.n
            )));
        }
        CovMatrix::from_rows(&j.data)
    }
}

impl From<CovMatrix> for CovMatrixJson {
    fn from(m: CovMatrix) -> Self {
        CovMatrixJson {
            n: m.n,
            data: (0..m.n)
                .map(|i| (0..m.n).map(|j| m.get(i, j)).collect())
                .collect(),
        }
    }
}

impl CovMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// Builds from a closure over (row, col); only the upper triangle is
    /// evaluated.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.upper[Self::off(n, i, j)] = f(i, j);
            }
        }
        m
    }

    /// Accepts a full matrix, validating finiteness and that the maximum
    /// asymmetry stays below [`ASYMMETRY_TOL`]; off-diagonal pairs are then
    /// averaged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix must be square".into()));
        }
        let mut max_dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if !rows[i][j].is_finite() {
                    return Err(Error::InvalidValue(format!(
                        "non-finite entry at ({i}, {j})"
                    )));
                }
                max_dev = max_dev.max((rows[i][j] - rows[j][i]).abs());
            }
        }
        if max_dev > ASYMMETRY_TOL {
            return Err(Error::Asymmetric {
                max_dev,
                tol: ASYMMETRY_TOL,
            });
        }
        Ok(Self::from_fn(n, |i, j| 0.5 * (rows[i][j] + rows[j][i])))
    }

    /// Symmetrizes a dense matrix without an asymmetry bound; intended for
    /// matrices that are symmetric up to floating-point accumulation.
    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    fn off(n: usize, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < n);
        i * n - i * (i + 1) / 2 + j
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.upper[Self::off(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.upper[Self::off(self.n, i, j)] = v;
    }

    pub fn add_assign(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.upper[Self::off(self.n, i, j)] += v;
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                s += v * v;
            }
        }
        s.sqrt()
    }

    /// `tr(A * self)` for a symmetric `A` of matching dimension.
    pub fn inner(&self, a: &DMatrix<f64>) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += a[(i, j)] * self.get(i, j);
            }
        }
        s
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            upper: self.upper.iter().map(|v| s * v).collect(),
        }
    }

    /// Smallest eigenvalue; reports how far from positive semidefinite the
    /// matrix is.
    pub fn psd_status(&self) -> f64 {
        linalg::min_eigenvalue(&self.to_dmatrix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_triangle_indexing_round_trips() {
        let m = CovMatrix::from_fn(4, |i, j| (i * 10 + j) as f64);
        for i in 0..4 {
            for j in i..4 {
                assert_eq!(m.get(i, j), (i * 10 + j) as f64);
                assert_eq!(m.get(j, i), (i * 10 + j) as f64);
            }
        }
    }

    #[test]
    fn load_rejects_asymmetry_above_tol() {
        let rows = vec![vec![1.0, 1.0], vec![1.0 + 1e-9, 2.0]];
        assert!(matches!(
            CovMatrix::from_rows(&rows),
            Err(Error::Asymmetric { .. })
        ));
        let rows = vec![vec![1.0, 1.0], vec![1.0 + 1e-13, 2.0]];
        let m = CovMatrix::from_rows(&rows).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn json_schema_shape() {
        let m = CovMatrix::from_rows(&[vec![0.5, 1.0], vec![1.0, 2.1]]).unwrap();
        let v: serde_json::Value = serde_json::to_value(&m).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["data"][0][1], 1.0);
        let back: CovMatrix = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn psd_status_detects_indefinite() {
        let m = CovMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!((m.psd_status() + 1.0).abs() < 1e-12);
    }
}
