//! Fixed-spectrum decision procedures: membership for a known outcome
//! structure, two-dimensional region scans, and the closed-form bounds for
//! dichotomic, spin, planar-random-walk and geometric-spectrum models.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use covcone_core::{linalg, CovMatrix, Spectrum, Tolerances};

use crate::certificate::ConicCertificate;
use crate::error::{Error, Result};
use crate::generators::{GeneratorSet, Provenance};
use crate::lp::{cone_linear_opt, cone_membership_lp};

/// Regime of the per-tuple production probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NuMode {
    /// Every tuple always contributes (`nu = 1`): difference generators.
    Unit,
    /// Rare production (`nu << 1`): second-moment (value-vector) generators.
    Small,
    /// Unknown, possibly varying production: union of both families.
    Free,
}

/// Cap on the number of raw direction vectors enumerated for one spectrum.
const GENERATOR_ENUMERATION_LIMIT: usize = 6_000_000;

/// Distinct per-site values to combine, each with a representative outcome
/// pair (difference mode) or outcome (value mode).
fn site_differences(values: &[f64]) -> Vec<(f64, usize, usize)> {
    let d = values.len();
    let mut out: Vec<(f64, usize, usize)> = vec![(0.0, 1, 1)];
    for a in 1..=d {
        for b in 1..=d {
            if a != b {
                let diff = values[a - 1] - values[b - 1];
                if !out.iter().any(|&(v, _, _)| v == diff) {
                    out.push((diff, a, b));
                }
            }
        }
    }
    out
}

fn site_values(values: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for (a0, &v) in values.iter().enumerate() {
        if !out.iter().any(|&(u, _)| u == v) {
            out.push((v, a0 + 1));
        }
    }
    out
}

/// Enumerates the deduplicated canonical direction set of a spectrum under
/// the given production regime: outcome-value differences for `Unit`,
/// outcome-value vectors for `Small`, their union for `Free`.
pub fn build_generators(spectrum: &Spectrum, mode: NuMode) -> Result<GeneratorSet> {
    let n = spectrum.n_sites();
    let mut raw: Vec<(DVector<f64>, Provenance)> = Vec::new();
    if matches!(mode, NuMode::Unit | NuMode::Free) {
        let per_site: Vec<Vec<(f64, usize, usize)>> = (0..n)
            .map(|k| site_differences(spectrum.site(k)))
            .collect();
        product_directions(&per_site, &mut raw, |reps| Provenance::Difference {
            c: reps.iter().map(|r| r.1).collect(),
            c_prime: reps.iter().map(|r| r.2).collect(),
        })?;
    }
    if matches!(mode, NuMode::Small | NuMode::Free) {
        let per_site: Vec<Vec<(f64, usize, usize)>> = (0..n)
            .map(|k| {
                site_values(spectrum.site(k))
                    .into_iter()
                    .map(|(v, a)| (v, a, a))
                    .collect()
            })
            .collect();
        product_directions(&per_site, &mut raw, |reps| Provenance::Value {
            c: reps.iter().map(|r| r.1).collect(),
        })?;
    }
    GeneratorSet::new(n, raw)
}

fn product_directions(
    per_site: &[Vec<(f64, usize, usize)>],
    raw: &mut Vec<(DVector<f64>, Provenance)>,
    provenance: impl Fn(&[(f64, usize, usize)]) -> Provenance,
) -> Result<()> {
    let n = per_site.len();
    let total: usize = per_site.iter().try_fold(1usize, |acc, s| {
        acc.checked_mul(s.len())
            .filter(|&t| t <= GENERATOR_ENUMERATION_LIMIT)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "direction enumeration exceeds the limit of {GENERATOR_ENUMERATION_LIMIT}"
                ))
            })
    })?;
    let mut picks = vec![0usize; n];
    for _ in 0..total {
        let reps: Vec<(f64, usize, usize)> = picks
            .iter()
            .enumerate()
            .map(|(k, &p)| per_site[k][p])
            .collect();
        if reps.iter().any(|r| r.0 != 0.0) {
            let w = DVector::from_fn(n, |i, _| reps[i].0);
            raw.push((w, provenance(&reps)));
        }
        for k in (0..n).rev() {
            picks[k] += 1;
            if picks[k] < per_site[k].len() {
                break;
            }
            picks[k] = 0;
        }
    }
    Ok(())
}

/// Membership of `gamma` in the cone attainable with the given spectrum and
/// production regime.
pub fn membership_fixed(
    gamma: &CovMatrix,
    spectrum: &Spectrum,
    mode: NuMode,
    tol: &Tolerances,
) -> Result<ConicCertificate> {
    let gens = build_generators(spectrum, mode)?;
    cone_membership_lp(gamma, &gens, tol)
}

/// Margins of the dichotomic-model inequalities
/// `gamma_xx - |gamma_xy| >= 0`, `gamma_yy - |gamma_xy| >= 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DichotomicReport {
    pub ok: bool,
    pub margin_x: f64,
    pub margin_y: f64,
}

/// Closed-form test for generation by identical two-valued pairs.
pub fn dichotomic_check(gamma: &CovMatrix) -> Result<DichotomicReport> {
    if gamma.n() != 2 {
        return Err(Error::DimensionMismatch(
            "dichotomic check applies to 2 x 2 matrices".into(),
        ));
    }
    let margin_x = gamma.get(0, 0) - gamma.get(0, 1).abs();
    let margin_y = gamma.get(1, 1) - gamma.get(0, 1).abs();
    Ok(DichotomicReport {
        ok: margin_x >= 0.0 && margin_y >= 0.0,
        margin_x,
        margin_y,
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpinReport {
    pub ok: bool,
    /// `(d - 1) gamma_11 - |gamma_12|`.
    pub margin: f64,
}

/// Closed-form inequality `|gamma_12| <= (d-1) gamma_11` satisfied by pairs
/// of identical equally spaced d-valued variables.
pub fn spin_check(gamma: &CovMatrix, d: usize) -> Result<SpinReport> {
    if gamma.n() != 2 {
        return Err(Error::DimensionMismatch(
            "spin check applies to 2 x 2 matrices".into(),
        ));
    }
    if d < 2 {
        return Err(Error::InvalidArgument("spin check needs d >= 2".into()));
    }
    let margin = (d as f64 - 1.0) * gamma.get(0, 0) - gamma.get(0, 1).abs();
    Ok(SpinReport {
        ok: margin >= 0.0,
        margin,
    })
}

/// Extreme point of the trace-1 slice closest to the axis for equally
/// spaced d-valued pairs: `(1/(1+(d-1)^2), (d-1)/(1+(d-1)^2))`; the second
/// coordinate also occurs with negative sign.
pub fn spin_vertex(d: usize) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::InvalidArgument("spin vertex needs d >= 2".into()));
    }
    let q = (d - 1) as f64;
    Ok((1.0 / (1.0 + q * q), q / (1.0 + q * q)))
}

/// Open forbidden interval for `sin(theta)` of extreme points generated by a
/// geometric spectrum with ratio `mu`:
/// `(2(mu-1)/((mu-1)^2+1), 2 mu (mu-1)/((mu-1)^2+mu^2))`.
pub fn geometric_band(mu: f64) -> Result<(f64, f64)> {
    let threshold = (3.0 + 2f64.sqrt()) / 2.0;
    if !(mu > threshold) {
        return Err(Error::InvalidArgument(format!(
            "geometric band requires mu > (3+sqrt(2))/2 ~ {threshold:.4}, got {mu}"
        )));
    }
    let m = mu - 1.0;
    Ok((2.0 * m / (m * m + 1.0), 2.0 * mu * m / (m * m + mu * mu)))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BrownianReport {
    pub ok: bool,
    /// `det(gamma) - tr(gamma)^2 / 8`.
    pub margin: f64,
}

/// Axis-free planar random-walk condition `det(gamma) >= tr(gamma)^2 / 8`.
pub fn brownian_check(gamma: &CovMatrix) -> Result<BrownianReport> {
    if gamma.n() != 2 {
        return Err(Error::DimensionMismatch(
            "planar check applies to 2 x 2 matrices".into(),
        ));
    }
    let det = gamma.get(0, 0) * gamma.get(1, 1) - gamma.get(0, 1) * gamma.get(0, 1);
    let tr = gamma.trace();
    let margin = det - tr * tr / 8.0;
    Ok(BrownianReport {
        ok: margin >= 0.0,
        margin,
    })
}

/// The four sign-pattern matrices whose rotated traces must stay
/// nonnegative for an axis-free dichotomic random walk.
pub fn brownian_w_matrices() -> [DMatrix<f64>; 4] {
    let w = |j: i32, i: i32| {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                1.0 + (-1f64).powi(j),
                (-1f64).powi(i),
                (-1f64).powi(i),
                1.0 + (-1f64).powi(j + 1),
            ],
        )
    };
    [w(1, 1), w(1, 2), w(2, 1), w(2, 2)]
}

/// Rotation sweep underlying [`brownian_check`]: minimum of
/// `tr(O gamma O^T W)` over `n_angles` rotations and the four sign
/// patterns.
pub fn brownian_sweep(gamma: &CovMatrix, n_angles: usize) -> Result<(bool, f64)> {
    if gamma.n() != 2 {
        return Err(Error::DimensionMismatch(
            "planar sweep applies to 2 x 2 matrices".into(),
        ));
    }
    let ws = brownian_w_matrices();
    let g = gamma.to_dmatrix();
    let mut min_val = f64::INFINITY;
    for t in 0..n_angles {
        let theta = std::f64::consts::PI * t as f64 / n_angles as f64;
        let (c, s) = (theta.cos(), theta.sin());
        let o = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let rotated = &o * &g * o.transpose();
        for w in &ws {
            let v = (w * &rotated).trace();
            min_val = min_val.min(v);
        }
    }
    Ok((min_val >= 0.0, min_val))
}

/// One support evaluation of a region scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SupportPoint {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
}

/// Two-dimensional slice of the trace-1 section of an attainable cone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionPolygon {
    /// Convex hull of the support points, counterclockwise.
    pub vertices: Vec<[f64; 2]>,
    /// Optimizer projections, one per scanned direction.
    pub support: Vec<SupportPoint>,
    /// Set when the generator set was empty and the region collapses to the
    /// origin.
    pub degenerate: bool,
}

impl RegionPolygon {
    /// Point-in-convex-polygon test with an absolute slack.
    pub fn contains(&self, p: [f64; 2], slack: f64) -> bool {
        let v = &self.vertices;
        if v.len() == 1 {
            return (p[0] - v[0][0]).hypot(p[1] - v[0][1]) <= slack;
        }
        if v.len() == 2 {
            // degenerate segment: distance to the segment
            let (a, b) = (v[0], v[1]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len2 = dx * dx + dy * dy;
            let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0);
            let (qx, qy) = (a[0] + t * dx, a[1] + t * dy);
            return (p[0] - qx).hypot(p[1] - qy) <= slack;
        }
        (0..v.len()).all(|i| {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            cross(a, b, p) >= -slack
        })
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew monotone chain; collinear points are dropped. Input need not be
/// deduplicated. Output is counterclockwise.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| a[0] == b[0] && a[1] == b[1]);
    if pts.len() <= 2 {
        return pts;
    }
    let scale: f64 = pts
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = 1e-12 * scale * scale;
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Scans the 2-D slice `(tr(A1 gamma), tr(A2 gamma))` of the trace-1
/// section of the fixed-spectrum cone over `n_dirs` support directions. The
/// polygon is exact: vertices are projections of the canonical generators
/// themselves, not solver output.
pub fn region_scan(
    spectrum: &Spectrum,
    mode: NuMode,
    a1: &DMatrix<f64>,
    a2: &DMatrix<f64>,
    n_dirs: usize,
) -> Result<RegionPolygon> {
    if n_dirs < 8 {
        return Err(Error::InvalidArgument(
            "region scans need at least 8 support directions".into(),
        ));
    }
    let n = spectrum.n_sites();
    if a1.nrows() != n || a1.ncols() != n || a2.nrows() != n || a2.ncols() != n {
        return Err(Error::DimensionMismatch(
            "projection matrices must match the spectrum dimension".into(),
        ));
    }
    let gens = build_generators(spectrum, mode)?;
    if gens.is_empty() {
        let support = (0..n_dirs)
            .map(|t| SupportPoint {
                theta: 2.0 * std::f64::consts::PI * t as f64 / n_dirs as f64,
                x: 0.0,
                y: 0.0,
            })
            .collect();
        return Ok(RegionPolygon {
            vertices: vec![[0.0, 0.0]],
            support,
            degenerate: true,
        });
    }
    let mut support = Vec::with_capacity(n_dirs);
    for t in 0..n_dirs {
        let theta = 2.0 * std::f64::consts::PI * t as f64 / n_dirs as f64;
        let objective = a1 * theta.cos() + a2 * theta.sin();
        let (_, k) = cone_linear_opt(&objective, &gens)?;
        let g = gens.get(k);
        support.push(SupportPoint {
            theta,
            x: g.quad(a1),
            y: g.quad(a2),
        });
    }
    let vertices = convex_hull(
        &support
            .iter()
            .map(|s| [s.x, s.y])
            .collect::<Vec<[f64; 2]>>(),
    );
    Ok(RegionPolygon {
        vertices,
        support,
        degenerate: false,
    })
}

/// Default slice for two-site scans: `(gamma_11, gamma_12)`.
pub fn default_projections() -> (DMatrix<f64>, DMatrix<f64>) {
    let e11 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let e12 = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
    (e11, e12)
}

/// Result of approximating a covariance matrix on a materialized outcome
/// grid.
#[derive(Debug, Clone)]
pub struct SpacingApproximation {
    pub approx: CovMatrix,
    /// `||approx - gamma||_F`.
    pub error: f64,
}

/// Rounds a PSD target onto the cone of a materialized grid: the Gram
/// factor columns of `scale * gamma` are floor-rounded entry-wise to the
/// nearest representable value difference, and the rounded Gram matrix is
/// scaled back. The result is always attainable with the grid spectrum.
///
/// Rounding follows the floor convention (next representable value below),
/// with a `1e-9`-relative guard against floating-point ties.
pub fn spacing_approximation(
    gamma: &CovMatrix,
    grid: &[f64],
    scale: f64,
) -> Result<SpacingApproximation> {
    if grid.len() < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least two outcome values".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "grid must be strictly increasing".into(),
        ));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    let n = gamma.n();
    let dense = gamma.to_dmatrix();
    let (vals, vecs) = linalg::sym_eigen(&dense);
    let floor = Tolerances::default().psd_floor(gamma.frobenius_norm());
    if vals[0] < floor {
        return Err(Error::Core(covcone_core::Error::NotPositiveSemidefinite {
            min_eig: vals[0],
            floor,
        }));
    }
    // Gram columns: gamma = sum_k f_k f_k^T with f_k = sqrt(lambda_k) v_k
    let mut diffs: Vec<f64> = Vec::with_capacity(grid.len() * grid.len());
    for &a in grid {
        for &b in grid {
            diffs.push(a - b);
        }
    }
    diffs.sort_by(f64::total_cmp);
    diffs.dedup();
    let span = diffs.last().unwrap() - diffs.first().unwrap();
    let guard = 1e-9 * span.max(1.0);
    let round_down = |x: f64| -> Result<f64> {
        let target = x + guard;
        match diffs.partition_point(|&d| d <= target) {
            0 => Err(Error::InvalidArgument(format!(
                "scaled Gram entry {x} falls below every representable difference"
            ))),
            k => Ok(diffs[k - 1]),
        }
    };
    let mut rounded = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let lam = vals[k].max(0.0);
        let f = vecs.column(k) * lam.sqrt();
        for i in 0..n {
            rounded[(i, k)] = round_down(scale * f[i])?;
        }
    }
    let approx_dense = &rounded * rounded.transpose() / (scale * scale);
    let approx = CovMatrix::from_dmatrix(&approx_dense);
    let error = (approx_dense - dense).norm();
    Ok(SpacingApproximation { approx, error })
}

/// Supremum of `|w_1 w_2| / w_1^2` over the asymmetric generator family
/// `w = (a - a', 1/b - 1/b')` with `a, a' <= a_max`, `b, b' <= b_max`,
/// restricted to `w_1 != 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AsymmetricBand {
    pub supremum: f64,
    /// Whether the supremum stays below 1, i.e. `|gamma_12| <= gamma_11` for
    /// the whole family.
    pub within_unit: bool,
}

pub fn asymmetric_band_check(a_max: usize, b_max: usize) -> Result<AsymmetricBand> {
    if a_max < 1 || b_max < 1 {
        return Err(Error::InvalidArgument(
            "index ranges must be at least 1".into(),
        ));
    }
    let mut sup: f64 = 0.0;
    for a in 1..=a_max {
        for ap in 1..=a_max {
            if a == ap {
                continue; // w_1 = 0 excluded
            }
            let w1 = (a as f64) - (ap as f64);
            for b in 1..=b_max {
                for bp in 1..=b_max {
                    let w2 = 1.0 / (b as f64) - 1.0 / (bp as f64);
                    sup = sup.max((w1 * w2).abs() / (w1 * w1));
                }
            }
        }
    }
    Ok(AsymmetricBand {
        supremum: sup,
        within_unit: sup <= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_spectrum(n: usize) -> Spectrum {
        Spectrum::identical(n, vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn binary_unit_generators_are_four_directions() {
        let gens = build_generators(&binary_spectrum(2), NuMode::Unit).unwrap();
        assert_eq!(gens.len(), 4);
    }

    #[test]
    fn binary_free_mode_adds_nothing() {
        // value vectors of {0,1}^2 coincide with difference directions here
        let gens = build_generators(&binary_spectrum(2), NuMode::Free).unwrap();
        assert_eq!(gens.len(), 4);
    }

    #[test]
    fn single_valued_site_yields_empty_unit_set() {
        let s = Spectrum::identical(1, vec![5.0]).unwrap();
        let gens = build_generators(&s, NuMode::Unit).unwrap();
        assert!(gens.is_empty());
        // in the rare-production regime the constant value is a generator
        let gens = build_generators(&s, NuMode::Small).unwrap();
        assert_eq!(gens.len(), 1);
    }

    #[test]
    fn membership_matches_generator_structure() {
        let tol = Tolerances::default();
        let gamma = CovMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let cert = membership_fixed(&gamma, &binary_spectrum(2), NuMode::Unit, &tol).unwrap();
        assert!(cert.is_member());
        let gamma = CovMatrix::from_rows(&[vec![0.5, 1.0], vec![1.0, 2.1]]).unwrap();
        let cert = membership_fixed(&gamma, &binary_spectrum(2), NuMode::Unit, &tol).unwrap();
        assert!(!cert.is_member());
        let gamma = CovMatrix::from_fn(2, |i, j| if i == j { 0.95 } else { 0.9 });
        let cert = membership_fixed(&gamma, &binary_spectrum(2), NuMode::Unit, &tol).unwrap();
        assert!(cert.is_member());
    }

    #[test]
    fn dichotomic_margins() {
        let id = CovMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { 0.0 });
        let rep = dichotomic_check(&id).unwrap();
        assert!(rep.ok && rep.margin_x == 1.0 && rep.margin_y == 1.0);
        let gamma = CovMatrix::from_rows(&[vec![0.5, 1.0], vec![1.0, 2.1]]).unwrap();
        let rep = dichotomic_check(&gamma).unwrap();
        assert!(!rep.ok);
        assert!((rep.margin_x + 0.5).abs() < 1e-15);
    }

    #[test]
    fn spin_vertices() {
        assert_eq!(spin_vertex(2).unwrap(), (0.5, 0.5));
        let (x, y) = spin_vertex(3).unwrap();
        assert!((x - 0.2).abs() < 1e-15 && (y - 0.4).abs() < 1e-15);
        // the vertex sits on the trace-1 circle |g12| = sqrt(g11 (1 - g11))
        for d in 2..=6 {
            let (x, y) = spin_vertex(d).unwrap();
            assert!((x * x + y * y - x).abs() < 1e-14);
        }
    }

    #[test]
    fn spin_inequality_fails_for_steep_families() {
        // gamma_xx = 1/r, gamma_xy = 1 violates for r > d - 1
        let d = 3;
        let r = 2.5;
        let gamma = CovMatrix::from_rows(&[vec![1.0 / r, 1.0], vec![1.0, r + 0.1]]).unwrap();
        assert!(!spin_check(&gamma, d).unwrap().ok);
        let r = 1.5;
        let gamma = CovMatrix::from_rows(&[vec![1.0 / r, 1.0], vec![1.0, r + 0.1]]).unwrap();
        assert!(spin_check(&gamma, d).unwrap().ok);
    }

    #[test]
    fn geometric_band_values() {
        let (lo, hi) = geometric_band(5.0).unwrap();
        assert!((lo - 8.0 / 17.0).abs() < 1e-15);
        assert!((hi - 40.0 / 41.0).abs() < 1e-15);
        let (lo, hi) = geometric_band(9.0).unwrap();
        assert!((lo - 16.0 / 65.0).abs() < 1e-15);
        assert!((hi - 144.0 / 145.0).abs() < 1e-15);
        assert!(geometric_band(2.0).is_err());
        // the interval collapses toward (0, 1) as the ratio grows
        let (lo, hi) = geometric_band(1e9).unwrap();
        assert!(lo < 1e-8 && hi > 1.0 - 1e-8);
    }

    #[test]
    fn brownian_closed_form() {
        let id = CovMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { 0.0 });
        assert!(brownian_check(&id).unwrap().ok);
        let skew = CovMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.1]]).unwrap();
        let rep = brownian_check(&skew).unwrap();
        assert!(!rep.ok);
        assert!((rep.margin - (0.1 - 1.21 / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn region_square_for_binary_pairs() {
        let (a1, a2) = default_projections();
        let region = region_scan(&binary_spectrum(2), NuMode::Unit, &a1, &a2, 64).unwrap();
        let mut verts = region.vertices.clone();
        verts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let expect = [[0.0, 0.0], [0.5, -0.5], [0.5, 0.5], [1.0, 0.0]];
        assert_eq!(verts.len(), 4);
        for (v, e) in verts.iter().zip(expect.iter()) {
            assert!((v[0] - e[0]).abs() < 1e-12 && (v[1] - e[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_region_is_single_point() {
        let s = Spectrum::identical(2, vec![3.0]).unwrap();
        let (a1, a2) = default_projections();
        let region = region_scan(&s, NuMode::Unit, &a1, &a2, 16).unwrap();
        assert!(region.degenerate);
        assert_eq!(region.vertices, vec![[0.0, 0.0]]);
    }

    #[test]
    fn spacing_rounds_representable_exactly() {
        // gamma = w w^T with w on the grid difference set
        let w = DVector::from_row_slice(&[1.0, 2.0]);
        let gamma = CovMatrix::from_dmatrix(&(&w * w.transpose()));
        let grid: Vec<f64> = (0..=4).map(|a| a as f64).collect();
        let out = spacing_approximation(&gamma, &grid, 1.0).unwrap();
        assert!(out.error < 1e-12, "error = {}", out.error);
    }

    #[test]
    fn spacing_error_shrinks_with_refinement() {
        let gamma = CovMatrix::from_rows(&[
            vec![2.0, 0.6, 0.3],
            vec![0.6, 1.5, -0.2],
            vec![0.3, -0.2, 1.0],
        ])
        .unwrap();
        let mut last = f64::INFINITY;
        for d in [10usize, 100, 1000] {
            // equally spaced grid with spacing l/d over [-2l, 2l]
            let l = 3.0;
            let grid: Vec<f64> = (-(2 * d as i64)..=(2 * d as i64))
                .map(|k| k as f64 * l / d as f64)
                .collect();
            let out = spacing_approximation(&gamma, &grid, 1.0).unwrap();
            assert!(out.error < last, "error must decrease with d");
            last = out.error;
        }
        assert!(last < 0.02);
    }

    #[test]
    fn asymmetric_family_stays_under_unit_ratio() {
        let tiny = asymmetric_band_check(2, 2).unwrap();
        assert!((tiny.supremum - 0.5).abs() < 1e-15);
        let wide = asymmetric_band_check(50, 50).unwrap();
        assert!(wide.within_unit);
        assert!(wide.supremum <= 1.0);
    }
}
