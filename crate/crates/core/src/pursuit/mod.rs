//! Single-snapshot greedy recovery.
//!
//! [`omp`] is classic orthogonal matching pursuit. [`promp`] and [`rpromp`]
//! fuse a prior prediction `x⁻ ~ N(x, P⁻)`: candidates are ranked by their
//! signal-to-prediction-error ratio conditioned on the current residual and
//! the detected coefficients are re-estimated by linear MMSE.
//!
//! All three share the same stopping rule: the support grows until it holds
//! `k_max` indices or until adding an index no longer strictly lowers the
//! residual norm, in which case the previous iterate is returned.

mod omp;
mod predictive;

pub use omp::omp;
pub use predictive::{
    mmse_rec, mmse_rec_with_cov, promp, rpromp, sper_scores, update_cov_inv, MmseEstimate, PursuitState,
};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative margin a residual norm must drop by to count as a decrease.
/// Keeps exact fits from accumulating round-off-sized coefficients.
pub(crate) const RESIDUAL_DECREASE_TOL: f64 = 1e-12;

/// Prediction of the state and its error covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    pub x_pred: DVector<f64>,
    pub p_pred: DMatrix<f64>,
}

impl Prior {
    /// Checks shape, symmetry and the sign of the diagonal.
    pub fn new(x_pred: DVector<f64>, p_pred: DMatrix<f64>) -> Result<Self> {
        let n = x_pred.len();
        if p_pred.shape() != (n, n) {
            return Err(Error::InvalidDimension(format!(
                "prior covariance is {}x{} but prediction has {n} entries",
                p_pred.nrows(),
                p_pred.ncols()
            )));
        }
        for i in 0..n {
            let v = p_pred[(i, i)];
            if !(v > 0.0) {
                return Err(Error::InvalidPrior { index: i, variance: v });
            }
        }
        let scale = p_pred.amax().max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (p_pred[(i, j)] - p_pred[(j, i)]).abs() > 1e-9 * scale {
                    return Err(Error::InvalidParameter(format!("prior covariance not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { x_pred, p_pred })
    }

    pub fn dim(&self) -> usize {
        self.x_pred.len()
    }
}

/// Output of a pursuit call.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    /// Length-N estimate, zero off `support`.
    pub x_hat: DVector<f64>,
    /// Detected indices in selection order.
    pub support: Vec<usize>,
    pub residual_norm: f64,
}

impl RecoveryResult {
    fn empty(n: usize, y: &DVector<f64>) -> Self {
        Self { x_hat: DVector::zeros(n), support: Vec::new(), residual_norm: y.norm() }
    }
}

/// Shared input checks for every pursuit variant.
fn check_inputs(y: &DVector<f64>, h: &DMatrix<f64>, k_max: usize) -> Result<()> {
    if y.len() != h.nrows() {
        return Err(Error::InvalidDimension(format!(
            "measurement has {} entries but sensing matrix has {} rows",
            y.len(),
            h.nrows()
        )));
    }
    if k_max >= h.nrows() {
        return Err(Error::InvalidParameter(format!("K_max = {k_max} must be smaller than M = {}", h.nrows())));
    }
    Ok(())
}

/// True once the residual is zero up to round-off; no further index can help.
fn exhausted(residual_norm: f64, y_norm: f64) -> bool {
    residual_norm <= RESIDUAL_DECREASE_TOL * y_norm
}

fn strictly_decreased(new_norm: f64, old_norm: f64, y_norm: f64) -> bool {
    new_norm < old_norm - RESIDUAL_DECREASE_TOL * y_norm
}
