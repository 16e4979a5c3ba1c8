use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::config::{Algorithm, ExperimentConfig, GridPoint};
use super::metrics::SrerAccumulator;
use super::table::{ResultRecord, ResultTable};
use crate::error::{Error, Result};
use crate::model::{simulate, ModelParams, ProcessRealization};
use crate::pursuit::omp;
use crate::rng::run_stream;
use crate::tracking::{build_f, dip_run, genie_kf_run, PredictionState, PredictorMatrix, Variant};

/// The realization that `run_experiment` uses for `run` at `point`.
///
/// Each run index owns one random stream of the master seed, so a run sees
/// the same stream at every grid point.
pub fn realization_for(config: &ExperimentConfig, point: &GridPoint, run: u64) -> Result<ProcessRealization> {
    let params = config.params_for(point)?;
    let lambda = config.lambda_for(point)?;
    simulate(&params, &lambda, &mut run_stream(config.seed, run))
}

/// Estimates of every algorithm for one realization, in the given order.
pub fn run_single(
    realization: &ProcessRealization,
    params: &ModelParams,
    predictor: Option<&PredictorMatrix>,
    algorithms: &[Algorithm],
) -> Result<Vec<Vec<DVector<f64>>>> {
    let h: &DMatrix<f64> = &realization.h;
    let m = params.m;
    if !(params.sigma_n2 > 0.0) {
        return Err(Error::InvalidParameter("predictive algorithms need positive noise variance".into()));
    }
    let r_inv = DMatrix::identity(m, m) / params.sigma_n2;
    let q_diag = DVector::from_element(params.n, params.sigma_w2);
    let init = PredictionState::isotropic(params.n, params.sigma_x2());
    let filtered = |states: Vec<crate::tracking::FilterState>| states.into_iter().map(|s| s.x_hat).collect();

    algorithms
        .iter()
        .map(|alg| match alg {
            Algorithm::Omp => {
                realization.measurements.iter().map(|y| omp(y, h, params.k_max).map(|r| r.x_hat)).collect()
            }
            Algorithm::Dip | Algorithm::Rdip => {
                let f = predictor.ok_or_else(|| Error::InvalidState("DIP needs a predictor".into()))?;
                let variant = if *alg == Algorithm::Dip { Variant::Plain } else { Variant::Robust };
                dip_run(&realization.measurements, h, &r_inv, f, &q_diag, &init, params.k_max, variant).map(filtered)
            }
            Algorithm::Genie => genie_kf_run(realization, &r_inv, &q_diag, params.alpha, &init).map(filtered),
        })
        .collect()
}

/// Run every grid point of the sweep and pool SRER energies across runs.
///
/// Runs execute on the current rayon pool; their energies are merged in run
/// order so the table does not depend on the number of threads.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let mut records = Vec::new();
    for (point_idx, point) in config.grid().iter().enumerate() {
        let params = config.params_for(point)?;
        let lambda = config.lambda_for(point)?;
        let needs_f = config.algorithms.iter().any(|a| matches!(a, Algorithm::Dip | Algorithm::Rdip));
        let predictor = if needs_f { Some(build_f(&lambda, params.alpha)?) } else { None };

        let per_run: Vec<Result<Vec<SrerAccumulator>>> = (0..config.runs)
            .into_par_iter()
            .map(|run| {
                let wrap = |e: Error| Error::Run { seed: config.seed, run, point: point_idx, source: Box::new(e) };
                let realization = simulate(&params, &lambda, &mut run_stream(config.seed, run)).map_err(wrap)?;
                let estimates =
                    run_single(&realization, &params, predictor.as_ref(), &config.algorithms).map_err(wrap)?;
                estimates
                    .iter()
                    .map(|est| {
                        let mut acc = SrerAccumulator::default();
                        acc.add(&realization.states, est).map(|_| acc).map_err(wrap)
                    })
                    .collect()
            })
            .collect();

        let mut totals = vec![SrerAccumulator::default(); config.algorithms.len()];
        for run in per_run {
            for (total, acc) in totals.iter_mut().zip(run?) {
                total.merge(&acc);
            }
        }
        for (alg, total) in config.algorithms.iter().zip(&totals) {
            let (srer_db, capped) = total.db_capped();
            records.push(ResultRecord {
                algorithm: *alg,
                smnr_db: point.smnr_db,
                kappa: point.kappa,
                nu: point.nu,
                srer_db,
                capped,
                runs: config.runs,
                seed: config.seed,
            });
        }
    }
    Ok(ResultTable { records })
}
