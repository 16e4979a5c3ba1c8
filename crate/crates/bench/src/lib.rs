//! Fixtures shared by the criterion benchmarks.

use dip_core::experiment::{realization_for, ExperimentConfig, GridPoint};
use dip_core::tracking::{build_f, PredictionState, PredictorMatrix};
use dip_core::{ModelParams, ProcessRealization};
use nalgebra::{DMatrix, DVector};

/// One desk-scale realization together with everything a tracker needs.
pub struct Fixture {
    pub params: ModelParams,
    pub realization: ProcessRealization,
    pub predictor: PredictorMatrix,
    pub r_inv: DMatrix<f64>,
    pub q_diag: DVector<f64>,
    pub init: PredictionState,
}

/// Default experiment (N=200, M=50, K=10, neighbor transitions) at the given
/// SMNR, trimmed to `snapshots`.
pub fn fixture(smnr_db: f64, snapshots: usize) -> Fixture {
    let config = ExperimentConfig { snapshots, seed: 2024, ..ExperimentConfig::default() };
    let point = GridPoint { smnr_db, kappa: 0.25, nu: 0.0 };
    let params = config.params_for(&point).expect("valid default config");
    let lambda = config.lambda_for(&point).expect("valid transition model");
    let realization = realization_for(&config, &point, 0).expect("simulation");
    Fixture {
        predictor: build_f(&lambda, params.alpha).expect("contractive predictor"),
        r_inv: DMatrix::identity(params.m, params.m) / params.sigma_n2,
        q_diag: DVector::from_element(params.n, params.sigma_w2),
        init: PredictionState::isotropic(params.n, params.sigma_x2()),
        params,
        realization,
    }
}
