mod common;

use common::*;
use dip_core::experiment::{run_experiment, Algorithm, ExperimentConfig, LambdaKind};
use dip_core::model::{
    build_lambda_mixture, build_lambda_neighbor, generate_sensing_matrix, simulate, step_support, unit_power_sigma_w2,
};
use dip_core::pursuit::{mmse_rec, omp, promp, rpromp, sper_scores, update_cov_inv, Prior, PursuitState};
use dip_core::tracking::{build_f, measurement_update, predict, PredictionState, Variant};
use dip_core::ModelParams;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use rand::seq::index;
use rand::Rng;

fn small_prior(seed: u64, n: usize) -> Prior {
    let mut rng = stream(seed, 99);
    let x = gauss_vector(&mut rng, n) * 0.5;
    let p = random_spd(&mut rng, n, 2.0) * 0.05;
    Prior::new(x, p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transition_rows_are_stochastic(n in 2usize..120, nu in 0.0f64..=1.0) {
        for lambda in [build_lambda_neighbor(n).unwrap(), build_lambda_mixture(n, nu).unwrap()] {
            for row in lambda.as_matrix().row_iter() {
                prop_assert!((row.sum() - 1.0).abs() < 1e-12);
                prop_assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
            }
        }
    }

    #[test]
    fn support_cardinality_is_conserved(seed in any::<u64>(), n in 3usize..60, nu in 0.0f64..=1.0, frac in 0.05f64..0.9) {
        let k = ((n as f64 * frac) as usize).clamp(1, n);
        let mut rng = stream(seed, 0);
        let mut support = index::sample(&mut rng, n, k).into_vec();
        let lambda = if seed % 2 == 0 { build_lambda_mixture(n, nu).unwrap() } else { build_lambda_neighbor(n).unwrap() };
        for _ in 0..10 {
            let (next, map) = step_support(&support, &lambda, &mut rng).unwrap();
            prop_assert_eq!(next.len(), support.len());
            prop_assert!(next.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(map.pairs.len(), support.len());
            support = next;
        }
    }

    #[test]
    fn sensing_columns_are_unit(seed in any::<u64>(), m in 1usize..40, extra in 1usize..40) {
        let h = generate_sensing_matrix(m, m + extra, &mut stream(seed, 0)).unwrap();
        let worst = h.column_iter().map(|c| (c.norm() - 1.0).abs()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12);
    }

    #[test]
    fn states_vanish_off_support(seed in any::<u64>(), nu in 0.0f64..=1.0) {
        let params = ModelParams { n: 30, m: 12, k: 4, k_max: 5, snapshots: 15, alpha: -0.8,
            sigma_w2: unit_power_sigma_w2(-0.8, 4), sigma_n2: 0.01 };
        let r = simulate(&params, &build_lambda_mixture(30, nu).unwrap(), &mut stream(seed, 0)).unwrap();
        for (x, s) in r.states.iter().zip(&r.supports) {
            prop_assert_eq!(s.len(), 4);
            for i in 0..30 {
                prop_assert_eq!(x[i] != 0.0, s.contains(&i));
            }
        }
    }

    #[test]
    fn sherman_morrison_matches_direct_inverse(seed in any::<u64>(), m in 2usize..9, log_cond in 0.0f64..=6.0, s2 in 0.0f64..10.0) {
        let mut rng = stream(seed, 1);
        let d = random_spd(&mut rng, m, log_cond);
        let h = gauss_vector(&mut rng, m);
        let got = update_cov_inv(&d.clone().lu().try_inverse().unwrap(), &h, s2);
        let want = (d + &h * h.transpose() * s2).lu().try_inverse().unwrap();
        prop_assert!((got - want).amax() < 1e-8);
    }

    #[test]
    fn mmse_beats_perturbations(seed in any::<u64>(), k in 1usize..5) {
        let mut rng = stream(seed, 2);
        let (m, n) = (7, 14);
        let h = unit_columns(&mut rng, m, n);
        let r_inv = random_spd(&mut rng, m, 1.0) * 3.0;
        let prior = small_prior(seed, n);
        let y = gauss_vector(&mut rng, m);
        let support = index::sample(&mut rng, n, k).into_vec();
        let x = mmse_rec(&y, &h, &r_inv, &prior, &support).unwrap();
        let cost = |v: &DVector<f64>| weighted_cost(v, &y, &h, &r_inv, &prior.x_pred, &prior.p_pred, &support);
        let best = cost(&x);
        for _ in 0..100 {
            let d = gauss_vector(&mut rng, k);
            let d = d.normalize() * 1e-3;
            prop_assert!(best <= cost(&(&x + d)));
        }
    }

    #[test]
    fn sper_is_positive_and_bounded_without_evidence(seed in any::<u64>()) {
        let mut rng = stream(seed, 3);
        let (m, n) = (6, 18);
        let h = unit_columns(&mut rng, m, n);
        let r_inv = DMatrix::identity(m, m) * (1.0 + 10.0 * rng.random::<f64>());
        let prior = small_prior(seed, n);
        let state = PursuitState::new(&gauss_vector(&mut rng, m), &h, &r_inv).unwrap();
        prop_assert!(sper_scores(&state, &prior, &h).unwrap().iter().all(|&r| r > 0.0));

        let zero_mean = Prior { x_pred: DVector::zeros(n), ..prior };
        let state = PursuitState::new(&DVector::zeros(m), &h, &r_inv).unwrap();
        prop_assert!(sper_scores(&state, &zero_mean, &h).unwrap().iter().all(|&r| r > 0.0 && r <= 1.0));
    }

    #[test]
    fn pursuit_respects_bound_and_returns_best_residual(seed in any::<u64>(), k_max in 1usize..6) {
        let mut rng = stream(seed, 4);
        let (m, n) = (10, 25);
        let h = unit_columns(&mut rng, m, n);
        let r_inv = DMatrix::identity(m, m) * 30.0;
        let prior = small_prior(seed, n);
        let y = gauss_vector(&mut rng, m);
        let runs: Vec<Vec<_>> = (1..=k_max).map(|kk| vec![
            omp(&y, &h, kk).unwrap(),
            promp(&y, &h, &r_inv, &prior, kk).unwrap(),
            rpromp(&y, &h, &r_inv, &prior, kk).unwrap(),
        ]).collect();
        let last = &runs[k_max - 1];
        for res in last {
            prop_assert!(res.support.len() <= k_max);
            prop_assert!(res.residual_norm <= y.norm());
            prop_assert!(res.x_hat.iter().enumerate().all(|(i, v)| *v == 0.0 || res.support.contains(&i)));
        }
        // OMP and PrOMP iterate the same sequence whatever k_max is, so a
        // smaller bound exposes an earlier iterate.
        for earlier in &runs[..k_max - 1] {
            for alg in 0..2 {
                prop_assert!(last[alg].residual_norm <= earlier[alg].residual_norm);
            }
        }
    }

    #[test]
    fn covariance_structure_after_update_and_prediction(seed in any::<u64>(), robust in any::<bool>(), nu in 0.0f64..=1.0) {
        let mut rng = stream(seed, 5);
        let (m, n) = (12, 30);
        let h = generate_sensing_matrix(m, n, &mut rng).unwrap();
        let r_inv = DMatrix::identity(m, m) * 200.0;
        let q = DVector::from_fn(n, |_, _| 0.01 + 0.05 * rng.random::<f64>());
        let f = build_f(&build_lambda_mixture(n, nu).unwrap(), -0.8).unwrap();
        let mut pred = PredictionState::isotropic(n, 0.1);
        let variant = if robust { Variant::Robust } else { Variant::Plain };
        for _ in 0..4 {
            let y = gauss_vector(&mut rng, m) * 0.5;
            let state = measurement_update(&y, &h, &r_inv, &pred, 4, variant).unwrap();
            for &i in &state.support {
                for j in (0..n).filter(|j| !state.support.contains(j)) {
                    prop_assert_eq!(state.p[(i, j)], 0.0);
                    prop_assert_eq!(state.p[(j, i)], 0.0);
                }
            }
            prop_assert!((&state.p - state.p.transpose()).amax() < 1e-10);
            pred = predict(&state, &f, &q).unwrap();
            prop_assert!((&pred.p_pred - pred.p_pred.transpose()).amax() < 1e-10);
            let min_eig = SymmetricEigen::new(pred.p_pred.clone()).eigenvalues.min();
            prop_assert!(min_eig >= q.min() - 1e-10, "{} < {}", min_eig, q.min());
        }
    }
}

#[test]
fn sweep_is_identical_across_thread_counts() {
    let config = ExperimentConfig {
        n: 60,
        k: 4,
        k_max: 4,
        snapshots: 12,
        lambda_kind: LambdaKind::Mixture,
        nu_grid: vec![0.2, 0.9],
        algorithms: vec![Algorithm::Omp, Algorithm::Dip, Algorithm::Rdip, Algorithm::Genie],
        runs: 6,
        seed: 77,
        ..Default::default()
    };
    let csv: Vec<String> = [1, 2, 8]
        .iter()
        .map(|&threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run_experiment(&config)).unwrap().to_csv()
        })
        .collect();
    assert_eq!(csv[0], csv[1]);
    assert_eq!(csv[0], csv[2]);
    assert_eq!(csv[0].lines().count(), 1 + 2 * 4);
}
