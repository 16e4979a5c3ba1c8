//! Dynamic sparse signal model: Markov-evolving supports, AR coefficient
//! dynamics, Gaussian sensing matrices and noisy linear measurements.
//!
//! Coordinates are 0-based throughout.

mod process;
mod transition;

pub use process::{generate_sensing_matrix, measure, simulate, step_state, ProcessRealization, SensingMatrix};
pub use transition::{
    build_lambda_mixture, build_lambda_neighbor, build_lambda_static, step_support, TransitionMap, TransitionMatrix,
};

use crate::error::{Error, Result};

/// Dimensions and noise levels of one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// State dimension.
    pub n: usize,
    /// Measurement dimension.
    pub m: usize,
    /// Number of active coefficients per snapshot.
    pub k: usize,
    /// Support-cardinality bound handed to the recovery algorithms.
    pub k_max: usize,
    /// Number of snapshots.
    pub snapshots: usize,
    /// AR coefficient shared by every transition.
    pub alpha: f64,
    /// Innovation variance.
    pub sigma_w2: f64,
    /// Measurement-noise variance.
    pub sigma_n2: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(0 < self.k && self.k <= self.k_max && self.k_max < self.m && self.m < self.n) {
            return Err(Error::InvalidDimension(format!(
                "need 0 < K <= K_max < M < N, got K={}, K_max={}, M={}, N={}",
                self.k, self.k_max, self.m, self.n
            )));
        }
        if self.snapshots == 0 {
            return Err(Error::InvalidDimension("snapshot count must be positive".into()));
        }
        if !(self.alpha.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("|alpha| must be < 1, got {}", self.alpha)));
        }
        if !(self.sigma_w2 > 0.0 && self.sigma_w2.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma_w2 must be positive, got {}", self.sigma_w2)));
        }
        if !(self.sigma_n2 >= 0.0 && self.sigma_n2.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma_n2 must be non-negative, got {}", self.sigma_n2)));
        }
        Ok(())
    }

    /// Stationary per-coefficient variance of the AR recursion.
    pub fn sigma_x2(&self) -> f64 {
        self.sigma_w2 / (1.0 - self.alpha * self.alpha)
    }
}

/// Innovation variance that makes `E‖x_t‖² = 1` with `k` active AR coefficients.
pub fn unit_power_sigma_w2(alpha: f64, k: usize) -> f64 {
    (1.0 - alpha * alpha) / k as f64
}
