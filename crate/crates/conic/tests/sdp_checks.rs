//! Validation of the free-spectrum machinery against independent routes:
//! Cholesky-bisection for the eigenpencil, random-direction soundness,
//! pattern-set completeness, cone nesting and witness duality.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use covcone_core::{covariance_of_model, CovMatrix, Spectrum, Tolerances};
use covcone_conic::freespec::{
    identity_witness_value, membership_free, patterns_for, witness_valid,
};
use covcone_conic::{
    enumerate_canonical_p, sdp_linear_opt, sdp_membership, verify_sdp_certificate, CanonicalP,
};
use covcone_oracle::{derived_seed, sample_micromodel};

/// Independent route to the largest pencil eigenvalue: bisection on
/// `lambda` with positive-definiteness of `lambda B - M` decided by
/// Cholesky.
fn pencil_max_bisect(m: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let is_above = |lam: f64| (b * lam - m).cholesky().is_some();
    let mut hi = 1.0;
    while !is_above(hi) {
        hi *= 2.0;
        assert!(hi < 1e12, "bisection upper bound runaway");
    }
    let mut lo = -hi;
    while is_above(lo) {
        lo *= 2.0;
        assert!(lo > -1e12);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if is_above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    0.5 * (&raw + raw.transpose())
}

#[test]
fn pencil_optimum_matches_bisection_and_random_probes() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for (n, d) in [(2usize, 2usize), (3, 3), (3, 4)] {
        let pset = patterns_for(n, d).unwrap();
        for case in 0..5 {
            let a = random_symmetric(n, &mut rng);
            let opt = sdp_linear_opt(&a, &pset).unwrap();
            let mut best_bisect = f64::NEG_INFINITY;
            for p in &pset {
                let pm = p.to_dmatrix();
                let m = 0.5
                    * (pm.transpose() * &a * &pm
                        + (pm.transpose() * a.transpose() * &pm).transpose());
                let b = pm.transpose() * &pm;
                best_bisect = best_bisect.max(pencil_max_bisect(&m, &b));
                // soundness: no direction beats the eigenvalue; the full
                // probe budget runs on the first case of each configuration
                let k = p.cols();
                let probes = match (k, case) {
                    (1, _) => 2,
                    (_, 0) => 100_000,
                    _ => 2_000,
                };
                for t in 0..probes {
                    let z = if k == 1 {
                        DVector::from_element(1, if t == 0 { 1.0 } else { -1.0 })
                    } else {
                        DVector::from_fn(k, |_, _| rng.random_range(-1.0..1.0f64))
                    };
                    let denom = (&b * &z).dot(&z);
                    if denom < 1e-12 {
                        continue;
                    }
                    let q = (&m * &z).dot(&z) / denom;
                    assert!(
                        q <= opt.value + 1e-9,
                        "probe beats the reported optimum: {q} > {}",
                        opt.value
                    );
                }
            }
            assert!(
                (best_bisect - opt.value).abs() < 1e-9,
                "case {case} (n={n}, d={d}): bisection {best_bisect} vs pencil {}",
                opt.value
            );
            // the reported direction attains the reported value
            let p = &pset[opt.argmax];
            let pm = p.to_dmatrix();
            let num = (pm.transpose() * &a * &pm * &opt.direction).dot(&opt.direction);
            let den = (pm.transpose() * &pm * &opt.direction).dot(&opt.direction);
            assert!((num / den - opt.value).abs() < 1e-9);
        }
    }
}

#[test]
fn membership_is_monotone_in_level_count() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut checked = 0usize;
    for _ in 0..20 {
        let raw = DMatrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
        let psd = &raw * raw.transpose();
        let gamma = CovMatrix::from_dmatrix(&psd);
        let mut last_member = false;
        for d in 2..=4usize {
            let member = match membership_free(&gamma, d, &tol) {
                Ok(cert) => {
                    verify_sdp_certificate(&cert, &gamma, &patterns_for(3, d).unwrap()).unwrap();
                    cert.is_member()
                }
                Err(covcone_conic::Error::Indeterminate(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!(
                !last_member || member,
                "membership lost when raising d to {d}"
            );
            last_member = member;
            checked += 1;
        }
        // PSD targets are always inside at d = n + 1
        assert!(last_member);
    }
    assert!(checked >= 40);
}

#[test]
fn free_spectrum_witnesses_pass_validity() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut rejections = 0usize;
    for _ in 0..30 {
        // rank-1 with steep binary-weight profile tends to fall outside
        let spread: f64 = rng.random_range(1.5..3.0);
        let v = DVector::from_fn(3, |i, _| spread.powi(i as i32 + 1));
        let noise = random_symmetric(3, &mut rng) * 0.01;
        let dense = &v * v.transpose() + &noise * noise.transpose();
        let gamma = CovMatrix::from_dmatrix(&dense);
        match membership_free(&gamma, 3, &tol) {
            Ok(cert) if !cert.is_member() => {
                let g = cert.witness_matrix().unwrap();
                let report = witness_valid(&g, 3, 3, true, &tol).unwrap();
                assert!(report.valid, "witness failed validity: {report:?}");
                let example = report.violating_example.unwrap();
                let violator = CovMatrix::from_rows(&example).unwrap();
                assert!(violator.inner(&g) < 0.0);
                rejections += 1;
            }
            Ok(_) => {}
            Err(covcone_conic::Error::Indeterminate(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(rejections >= 10, "corpus must exercise rejections, got {rejections}");
}

#[test]
fn every_outcome_pair_lands_in_exactly_one_pattern_column_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for n in 2..=4usize {
        for d in 2..=(n + 1).min(4) {
            let enumerated = enumerate_canonical_p(n, d).unwrap();
            let by_entries: std::collections::BTreeSet<Vec<i8>> = enumerated
                .iter()
                .map(|e| e.p.entries().to_vec())
                .collect();
            assert_eq!(by_entries.len(), enumerated.len(), "duplicate patterns");
            // generic spectrum: distinct irrational-ish values
            let values: Vec<f64> = (0..d)
                .map(|a| a as f64 + 0.1 * rng.random_range(0.0..1.0))
                .collect();
            let mut digits = vec![1usize; 2 * n];
            loop {
                let (c, cp) = digits.split_at(n);
                let (rows, rank) = covcone_conic::canonical::pattern_of_pair(c, cp, d);
                if rank == d - 1 {
                    let mut entries = vec![0i8; n * (d - 1)];
                    for (i, row) in rows.iter().enumerate() {
                        for (k, &e) in row.iter().enumerate() {
                            entries[i * (d - 1) + k] = e;
                        }
                    }
                    assert!(
                        by_entries.contains(&entries),
                        "pattern of ({c:?}, {cp:?}) missing from enumeration"
                    );
                    // the dressed difference vector lies in the pattern's
                    // column space
                    let w = DVector::from_fn(n, |i, _| values[c[i] - 1] - values[cp[i] - 1]);
                    let p = CanonicalP::new(n, d - 1, entries).unwrap();
                    let pm = p.to_dmatrix();
                    let gram = pm.transpose() * &pm;
                    let rhs = pm.transpose() * &w;
                    let t = gram.cholesky().unwrap().solve(&rhs);
                    assert!(
                        (pm * t - &w).norm() < 1e-9 * (1.0 + w.norm()),
                        "difference vector escapes its pattern column space"
                    );
                }
                let mut pos = 2 * n;
                let mut done = false;
                loop {
                    if pos == 0 {
                        done = true;
                        break;
                    }
                    pos -= 1;
                    if digits[pos] < d {
                        digits[pos] += 1;
                        break;
                    }
                    digits[pos] = 1;
                }
                if done {
                    break;
                }
            }
        }
    }
}

#[test]
fn patterns_are_not_redundant_for_small_sizes() {
    // no two patterns answer every linear question identically
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for (n, d) in [(2usize, 2usize), (3, 2), (3, 3)] {
        let pset = patterns_for(n, d).unwrap();
        for i in 0..pset.len() {
            for j in (i + 1)..pset.len() {
                let mut separated = false;
                for _ in 0..20 {
                    let a = random_symmetric(n, &mut rng);
                    let vi = sdp_linear_opt(&a, &pset[i..=i]).unwrap().value;
                    let vj = sdp_linear_opt(&a, &pset[j..=j]).unwrap().value;
                    if (vi - vj).abs() > 1e-9 {
                        separated = true;
                        break;
                    }
                }
                assert!(
                    separated,
                    "(n={n}, d={d}): patterns {i} and {j} collapse on 20 random objectives"
                );
            }
        }
    }
}

#[test]
fn lemma_vector_annihilates_every_dependent_pattern() {
    for (n, d) in [(3usize, 2usize), (3, 3), (4, 3), (4, 4)] {
        let enumerated = enumerate_canonical_p(n, d).unwrap();
        for e in &enumerated {
            if d <= n {
                // more rows than parameters: a dependency must exist
                let s = e
                    .null_vector
                    .as_ref()
                    .expect("dependent rows admit a sign combination");
                assert!(s.iter().any(|&x| x != 0));
                for k in 0..(d - 1) {
                    let dot: i32 = (0..n).map(|i| s[i] as i32 * e.p.get(i, k) as i32).sum();
                    assert_eq!(dot, 0, "null vector fails on column {k} of {:?}", e.p);
                }
            }
        }
    }
}

#[test]
fn sampled_identical_models_respect_binary_weight_witness() {
    // soundness of the closed-form witness on model-generated matrices
    for case in 0..100u64 {
        let spectrum = Spectrum::identical(3, vec![-0.7, 0.4, 1.9]).unwrap();
        let model = sample_micromodel(&spectrum, 2, 1.0, derived_seed(0xB, case)).unwrap();
        let gamma = covariance_of_model(&model).unwrap();
        let value = identity_witness_value(&gamma).unwrap();
        assert!(value >= -1e-9 * (1.0 + gamma.frobenius_norm()));
    }
}

#[test]
fn indeterminate_band_is_narrow() {
    // an interior member and a clear outsider both resolve; only the report
    // type distinguishes them
    let tol = Tolerances::default();
    let gamma = CovMatrix::from_fn(3, |i, j| if i == j { 1.0 } else { 0.2 });
    let cert = sdp_membership(&gamma, &patterns_for(3, 3).unwrap(), &tol).unwrap();
    assert!(cert.is_member());
    let gamma = CovMatrix::from_fn(3, |i, j| 2f64.powi((i + j) as i32 + 2));
    let cert = sdp_membership(&gamma, &patterns_for(3, 3).unwrap(), &tol).unwrap();
    assert!(!cert.is_member());
}
