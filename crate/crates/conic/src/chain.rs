//! Bipartite chain-functional analysis: the chain witness on 2n macroscopic
//! variables, its minimum over all covariance matrices, over classical
//! dichotomic models, its quantum saturation, and the impossibility bound
//! for finitely-valued models.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use covcone_core::linalg;

use crate::error::{Error, Result};

/// Chain coupling block `M`: `M_kk = 1`, `M_{k+1,k} = 1`, `M_{1,n} = -1`.
pub fn chain_block(n: usize) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument("chain needs n >= 2".into()));
    }
    let mut m = DMatrix::<f64>::identity(n, n);
    for k in 0..n - 1 {
        m[(k + 1, k)] = 1.0;
    }
    m[(0, n - 1)] = -1.0;
    Ok(m)
}

/// Symmetric `2n x 2n` chain matrix `[[0, M/2], [M^T/2, 0]]` on the
/// `(X-block, Y-block)` variable ordering, so the chain functional is
/// `tr(G gamma)`.
pub fn chain_matrix(n: usize) -> Result<DMatrix<f64>> {
    let m = chain_block(n)?;
    let mut g = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            g[(i, n + j)] = 0.5 * m[(i, j)];
            g[(n + j, i)] = 0.5 * m[(i, j)];
        }
    }
    Ok(g)
}

/// Minimum of the chain functional over all trace-1 covariance matrices,
/// `-cos(pi / 2n)`, with the eigenvalue cross-check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GStar {
    pub value: f64,
    /// `lambda_min` of the chain matrix, computed numerically; equals
    /// `value` up to solver accuracy.
    pub solver_min: f64,
}

pub fn g_star(n: usize) -> Result<GStar> {
    let g = chain_matrix(n)?;
    let value = -(std::f64::consts::PI / (2.0 * n as f64)).cos();
    Ok(GStar {
        value,
        solver_min: linalg::min_eigenvalue(&g),
    })
}

/// Quadratic form maximized by the dichotomic side:
/// `G' = M^T M` (diagonal 2, supradiagonal 1, corner -1 for n >= 3).
pub fn quadratic_form_matrix(n: usize) -> Result<DMatrix<f64>> {
    let m = chain_block(n)?;
    Ok(m.transpose() * m)
}

/// Spectrum of the chain quadratic form.
#[derive(Debug, Clone)]
pub struct CirculantEigs {
    /// `2 (1 + cos((2l + 1) pi / n))` for `l = 0..n-1`.
    pub eigenvalues: Vec<f64>,
    pub top_value: f64,
    /// Orthonormal real basis of the top eigenspace:
    /// `sqrt(2/n) sin(k pi / n)` and `sqrt(2/n) cos(k pi / n)`, `k = 1..n`.
    pub basis: [DVector<f64>; 2],
}

/// Closed-form eigenvalues of the chain quadratic form via the twisted
/// translation ansatz, plus the two-dimensional top eigenspace.
pub fn circulant_eigs(n: usize) -> Result<CirculantEigs> {
    if n < 2 {
        return Err(Error::InvalidArgument("chain needs n >= 2".into()));
    }
    let nf = n as f64;
    let eigenvalues: Vec<f64> = (0..n)
        .map(|l| 2.0 * (1.0 + ((2 * l + 1) as f64 * std::f64::consts::PI / nf).cos()))
        .collect();
    let top_value = 2.0 * (1.0 + (std::f64::consts::PI / nf).cos());
    let scale = (2.0 / nf).sqrt();
    let sin_vec = DVector::from_fn(n, |k, _| {
        scale * ((k + 1) as f64 * std::f64::consts::PI / nf).sin()
    });
    let cos_vec = DVector::from_fn(n, |k, _| {
        scale * ((k + 1) as f64 * std::f64::consts::PI / nf).cos()
    });
    Ok(CirculantEigs {
        eigenvalues,
        top_value,
        basis: [sin_vec, cos_vec],
    })
}

/// Minimum of the chain functional when one side is classical and
/// two-valued: `-sqrt(1 - 1/(2(n-1)))`.
pub fn g_two(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument("chain needs n >= 2".into()));
    }
    Ok(-(1.0 - 1.0 / (2.0 * (n as f64 - 1.0))).sqrt())
}

/// Brute force over all sign patterns `{-1, 0, 1}^n \ {0}`: the dichotomic
/// side restricts the quadratic form to sign directions, so the optimum is
/// `-sqrt(max Rayleigh quotient) / 2` after balancing the two norms.
pub fn g_two_brute_force(n: usize) -> Result<BruteForceChain> {
    if n < 2 {
        return Err(Error::InvalidArgument("chain needs n >= 2".into()));
    }
    if n > 16 {
        return Err(Error::InvalidArgument(
            "sign-pattern enumeration is limited to n <= 16".into(),
        ));
    }
    let gp = quadratic_form_matrix(n)?;
    let mut best = f64::NEG_INFINITY;
    let mut best_pattern = vec![0i8; n];
    let total = 3usize.pow(n as u32);
    let mut s = vec![0i8; n];
    for code in 1..total {
        let mut c = code;
        let mut norm2 = 0.0;
        for k in 0..n {
            let digit = (c % 3) as i8 - 1;
            c /= 3;
            s[k] = digit;
            norm2 += (digit * digit) as f64;
        }
        if norm2 == 0.0 {
            continue;
        }
        let mut quad = 0.0;
        for i in 0..n {
            if s[i] == 0 {
                continue;
            }
            for j in 0..n {
                quad += (s[i] as f64) * gp[(i, j)] * (s[j] as f64);
            }
        }
        let rayleigh = quad / norm2;
        if rayleigh > best {
            best = rayleigh;
            best_pattern.copy_from_slice(&s);
        }
    }
    Ok(BruteForceChain {
        value: -best.sqrt() / 2.0,
        max_rayleigh: best,
        argmax_pattern: best_pattern,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BruteForceChain {
    /// Chain minimum implied by the best sign direction.
    pub value: f64,
    pub max_rayleigh: f64,
    pub argmax_pattern: Vec<i8>,
}

/// Correlator of two spin measurements in the xz-plane on the two-qubit
/// singlet, computed from the measurement operators.
pub fn singlet_correlator(psi: f64, phi: f64) -> f64 {
    let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let sz = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let a = &sx * psi.cos() + &sz * psi.sin();
    let b = &sx * phi.cos() + &sz * phi.sin();
    let op = a.kronecker(&b);
    // |01> - |10> over sqrt(2) in the product basis 00, 01, 10, 11
    let singlet = DVector::from_row_slice(&[0.0, 1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0]);
    (singlet.transpose() * op * &singlet)[(0, 0)]
}

/// Two-valued quantum model saturating the chain minimum: `2n` singlet
/// pairs, equatorial angles `psi_k = (k-1) pi / n`, `phi_k = (2k-1) pi / 2n`
/// and microscopic outcome values `+-1/(2n)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantumChainModel {
    pub n: usize,
    pub alice_angles: Vec<f64>,
    pub bob_angles: Vec<f64>,
    pub outcome_value: f64,
    pub pairs: usize,
    /// Aggregated macroscopic correlators `<X_j Y_k>`.
    pub correlators: Vec<Vec<f64>>,
    /// `sum_k <X_k^2> + sum_k <Y_k^2>`; equals 1 by construction.
    pub normalization: f64,
}

impl QuantumChainModel {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("chain needs n >= 2".into()));
        }
        let nf = n as f64;
        let alice_angles: Vec<f64> = (1..=n)
            .map(|k| (k as f64 - 1.0) * std::f64::consts::PI / nf)
            .collect();
        let bob_angles: Vec<f64> = (1..=n)
            .map(|k| (2.0 * k as f64 - 1.0) * std::f64::consts::PI / (2.0 * nf))
            .collect();
        let outcome_value = 1.0 / (2.0 * nf);
        let pairs = 2 * n;
        let per_pair_scale = outcome_value * outcome_value;
        let correlators: Vec<Vec<f64>> = alice_angles
            .iter()
            .map(|&psi| {
                bob_angles
                    .iter()
                    .map(|&phi| pairs as f64 * per_pair_scale * singlet_correlator(psi, phi))
                    .collect()
            })
            .collect();
        // each squared measurement operator is the identity, so every
        // microscopic second moment is outcome_value^2
        let normalization = (2 * n) as f64 * pairs as f64 * per_pair_scale;
        Ok(Self {
            n,
            alice_angles,
            bob_angles,
            outcome_value,
            pairs,
            correlators,
            normalization,
        })
    }

    /// Value of the chain functional on the aggregated correlators.
    pub fn chain_value(&self) -> f64 {
        let n = self.n;
        let c = &self.correlators;
        let mut v = 0.0;
        for k in 0..n {
            v += c[k][k];
        }
        for k in 0..n - 1 {
            v += c[k + 1][k];
        }
        v - c[0][n - 1]
    }
}

/// Chain value of the saturating quantum model.
pub fn quantum_chain_value(n: usize) -> Result<f64> {
    Ok(QuantumChainModel::new(n)?.chain_value())
}

/// Hypothesis check and distance bound for the impossibility of saturating
/// the chain minimum with d-valued classical variables: under
/// `d(d-1)/2 + 3 <= ceil(n/2)` the dichotomic-side vector stays at least
/// `(4/n) sin^2(pi/2n) sin^2(pi/n)` (squared distance) away from the top
/// eigenspace.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ImpossibilityRecord {
    pub d: usize,
    pub hypothesis_ok: bool,
    pub distance_bound: f64,
}

pub fn impossibility_bound(n: usize, d: usize) -> Result<ImpossibilityRecord> {
    if n < 2 || d < 2 {
        return Err(Error::InvalidArgument(
            "impossibility bound needs n >= 2 and d >= 2".into(),
        ));
    }
    let hypothesis_ok = d * (d - 1) / 2 + 3 <= n.div_ceil(2);
    let nf = n as f64;
    let s1 = (std::f64::consts::PI / (2.0 * nf)).sin();
    let s2 = (std::f64::consts::PI / nf).sin();
    Ok(ImpossibilityRecord {
        d,
        hypothesis_ok,
        distance_bound: 4.0 / nf * s1 * s1 * s2 * s2,
    })
}

/// One-interaction inequality for a two-valued side against an n-valued
/// side:
/// `1/2 sqrt((4^n - 1)/3 - 1/n) [<X^2> + sum <Y_k^2>] - sum 2^{k-1} <X Y_k> >= 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HopeReport {
    pub ok: bool,
    pub margin: f64,
}

pub fn hope_check(
    x_second_moment: f64,
    y_second_moments: &DMatrix<f64>,
    cross: &DVector<f64>,
) -> Result<HopeReport> {
    let n = y_second_moments.nrows();
    if y_second_moments.ncols() != n || cross.len() != n || n == 0 {
        return Err(Error::DimensionMismatch(
            "second-moment matrix must be n x n with an n-entry cross vector".into(),
        ));
    }
    let pow = 4f64.powi(n as i32) - 1.0;
    let coef = 0.5 * (pow / 3.0 - 1.0 / n as f64).sqrt();
    let bracket = x_second_moment + y_second_moments.trace();
    let weighted: f64 = (0..n).map(|k| 2f64.powi(k as i32) * cross[k]).sum();
    let margin = coef * bracket - weighted;
    Ok(HopeReport {
        ok: margin >= 0.0,
        margin,
    })
}

/// The classical rank-1 matrix violating the one-interaction inequality:
/// `(w^A, w^B) (w^A, w^B)^T` with `w^A = 1`,
/// `w^B_k = sqrt(3/(4^n - 1)) 2^{k-1}`.
pub fn hope_violating_matrix(n: usize) -> Result<DMatrix<f64>> {
    if n < 1 {
        return Err(Error::InvalidArgument("needs n >= 1".into()));
    }
    let pow = 4f64.powi(n as i32) - 1.0;
    let coef = (3.0 / pow).sqrt();
    let mut w = DVector::zeros(n + 1);
    w[0] = 1.0;
    for k in 0..n {
        w[k + 1] = coef * 2f64.powi(k as i32);
    }
    Ok(&w * w.transpose())
}

/// Complete closed-form and solver-cross-checked summary for one chain
/// length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainReport {
    pub n: usize,
    /// Minimum over all covariance matrices: `-cos(pi/2n)`.
    pub g_star: f64,
    /// Minimum with a classical two-valued side: `-sqrt(1 - 1/(2(n-1)))`.
    pub g_two: f64,
    /// `lambda_min` of the chain matrix (numeric cross-check of `g_star`).
    pub solver_min: f64,
    /// Chain value of the saturating singlet model.
    pub quantum_value: f64,
    /// Largest eigenvalue of the chain quadratic form.
    pub circulant_top: f64,
    /// Sign-pattern brute force, present for n <= 12.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_two_brute: Option<f64>,
    pub gap_quantum: f64,
    pub gap_two: f64,
    /// The two closed forms coincide at n = 3 even though they separate for
    /// larger n; surfaced rather than resolved.
    pub g_two_equals_g_star: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub impossibility: Option<ImpossibilityRecord>,
}

pub fn chain_report(n: usize, d: Option<usize>) -> Result<ChainReport> {
    let gs = g_star(n)?;
    let gt = g_two(n)?;
    let quantum_value = quantum_chain_value(n)?;
    let circ = circulant_eigs(n)?;
    let g_two_brute = if n <= 12 {
        Some(g_two_brute_force(n)?.value)
    } else {
        None
    };
    let impossibility = d.map(|d| impossibility_bound(n, d)).transpose()?;
    Ok(ChainReport {
        n,
        g_star: gs.value,
        g_two: gt,
        solver_min: gs.solver_min,
        quantum_value,
        circulant_top: circ.top_value,
        g_two_brute,
        gap_quantum: quantum_value - gs.value,
        gap_two: gt - gs.value,
        g_two_equals_g_star: (gt - gs.value).abs() < 1e-12,
        impossibility,
    })
}
