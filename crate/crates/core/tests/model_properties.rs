//! Property tests for model evaluation: positive semidefiniteness, affine
//! reparameterization of outcome values, and the detector-reduction
//! residual identity.

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use covcone_core::{
    covariance_of_model, detector_reduction, CovMatrix, DetectorBank, JointTable, MicroModel,
    MicroTuple, ResponseMoments, Spectrum,
};

fn random_model(n: usize, d: usize, tuples: usize, seed: u64) -> MicroModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites = Vec::with_capacity(n);
    for _ in 0..n {
        let mut vals: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        vals.sort_by(f64::total_cmp);
        // de-duplicate by nudging (measure-zero anyway)
        for i in 1..vals.len() {
            if vals[i] <= vals[i - 1] {
                vals[i] = vals[i - 1] + 1e-6;
            }
        }
        sites.push(vals);
    }
    let spectrum = Spectrum::new(sites).unwrap();
    let cells = d.pow(n as u32);
    let mut list = Vec::with_capacity(tuples);
    for _ in 0..tuples {
        let mut probs: Vec<f64> = (0..cells)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let sum: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= sum);
        list.push(
            MicroTuple::new(
                rng.random_range(0.1..4.0),
                spectrum.clone(),
                JointTable::new(vec![d; n], probs).unwrap(),
            )
            .unwrap(),
        );
    }
    MicroModel::unit_nu(list).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unit_nu_covariance_is_psd(seed in 0u64..1_000_000) {
        let model = random_model(3, 3, 3, seed);
        let gamma = covariance_of_model(&model).unwrap();
        let floor = -1e-9 * (1.0 + gamma.frobenius_norm());
        prop_assert!(gamma.psd_status() >= floor);
    }

    #[test]
    fn affine_outcome_map_scales_covariance(seed in 0u64..1_000_000, s in prop_oneof![0.25f64..4.0, -4.0f64..-0.25], t in -3.0f64..3.0) {
        let model = random_model(2, 3, 2, seed);
        let gamma = covariance_of_model(&model).unwrap();
        let mapped = covariance_of_model(&model.affine_values(s, t).unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = s * s * gamma.get(i, j);
                prop_assert!((mapped.get(i, j) - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
                // the zero pattern is untouched by the reparameterization
                if gamma.get(i, j) == 0.0 {
                    prop_assert!(mapped.get(i, j).abs() <= 1e-12);
                }
            }
        }
    }
}

fn random_bank(n: usize, d: usize, seed: u64) -> DetectorBank {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites = (0..n)
        .map(|_| {
            let mut means: Vec<f64> = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
            means.sort_by(f64::total_cmp);
            means
                .into_iter()
                .map(|m| {
                    let var = rng.random_range(0.0..0.5);
                    ResponseMoments {
                        mean: m,
                        second_moment: m * m + var,
                    }
                })
                .collect()
        })
        .collect();
    DetectorBank::new(sites).unwrap()
}

/// Covariance produced by probabilistic detectors, evaluated from first
/// principles by integrating the response moments over the joint tables.
fn probabilistic_covariance(bank: &DetectorBank, model: &MicroModel) -> CovMatrix {
    let n = model.n_sites();
    let nu = model.nu();
    let mut gamma = CovMatrix::zeros(n);
    for tuple in model.tuples() {
        let mut mean_sig = vec![0.0; n];
        let mut second_sig = CovMatrix::zeros(n);
        for (outcome, p) in tuple.joint.iter() {
            if p == 0.0 {
                continue;
            }
            for i in 0..n {
                let mi = bank.moments(i, outcome[i]);
                mean_sig[i] += p * mi.mean;
                // diagonal uses the full second moment of the response
                second_sig.add_assign(i, i, p * mi.second_moment);
                for j in (i + 1)..n {
                    let mj = bank.moments(j, outcome[j]);
                    second_sig.add_assign(i, j, p * mi.mean * mj.mean);
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                let c = nu * second_sig.get(i, j) - nu * nu * mean_sig[i] * mean_sig[j];
                gamma.add_assign(i, j, tuple.weight * c);
            }
        }
    }
    gamma
}

#[test]
fn detector_reduction_residual_is_diagonal_noise() {
    for case in 0..100u64 {
        let model = random_model(2, 3, 2, 1000 + case);
        let bank = random_bank(2, 3, 2000 + case);
        let red = detector_reduction(&bank, &model).unwrap();
        let det_cov = red.deterministic_covariance().unwrap();
        let prob_cov = probabilistic_covariance(&bank, &model);
        for (i, k) in red.noise.iter().enumerate() {
            assert!(*k >= 0.0, "noise must be nonnegative, got {k}");
            let expect = det_cov.get(i, i) + k;
            assert!(
                (prob_cov.get(i, i) - expect).abs() < 1e-10,
                "case {case}: diagonal identity off by {}",
                (prob_cov.get(i, i) - expect).abs()
            );
        }
        for i in 0..2 {
            for j in (i + 1)..2 {
                assert!(
                    (prob_cov.get(i, j) - det_cov.get(i, j)).abs() < 1e-10,
                    "case {case}: off-diagonal residual must vanish"
                );
            }
        }
    }
}

#[test]
fn reduction_with_nu_keeps_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..20u64 {
        let base = random_model(2, 2, 2, 500 + case);
        let nu = rng.random_range(0.2..1.0);
        let model = MicroModel::new(base.tuples().to_vec(), nu).unwrap();
        let bank = random_bank(2, 2, 600 + case);
        let red = detector_reduction(&bank, &model).unwrap();
        let det_cov = red.deterministic_covariance().unwrap();
        let prob_cov = probabilistic_covariance(&bank, &model);
        for i in 0..2 {
            for j in i..2 {
                let expect = det_cov.get(i, j) + if i == j { red.noise[i] } else { 0.0 };
                assert!((prob_cov.get(i, j) - expect).abs() < 1e-10);
            }
        }
    }
}
