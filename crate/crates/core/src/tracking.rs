//! Sequential recovery: dynamic iterative pursuit (DIP / rDIP) and the
//! genie-aided Kalman filter used as a performance bound.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{scatter, symmetrize};
use crate::model::{ProcessRealization, TransitionMatrix};
use crate::pursuit::{mmse_rec_with_cov, promp, rpromp, Prior};

/// Linear predictor `x⁻_{t+1} = F x̂_t` that superposes every possible
/// transition: `f_ij = λ_ji · α`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorMatrix {
    f: DMatrix<f64>,
    /// Row-wise nonzeros, kept when F is sparse enough to make them pay off.
    rows: Option<Vec<Vec<(usize, f64)>>>,
}

impl PredictorMatrix {
    /// Wrap an arbitrary square predictor.
    pub fn new(f: DMatrix<f64>) -> Result<Self> {
        let n = f.nrows();
        if f.ncols() != n {
            return Err(Error::InvalidDimension(format!("predictor must be square, got {:?}", f.shape())));
        }
        let nnz = f.iter().filter(|v| **v != 0.0).count();
        let rows = (nnz * 8 <= n * n)
            .then(|| (0..n).map(|i| (0..n).filter(|&j| f[(i, j)] != 0.0).map(|j| (j, f[(i, j)])).collect()).collect());
        Ok(Self { f, rows })
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.f.nrows()
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.rows {
            Some(rows) => DVector::from_iterator(
                rows.len(),
                rows.iter().map(|row| row.iter().map(|&(j, v)| v * x[j]).sum::<f64>()),
            ),
            None => &self.f * x,
        }
    }

    /// `F P Fᵀ`.
    fn sandwich(&self, p: &DMatrix<f64>) -> DMatrix<f64> {
        let Some(rows) = &self.rows else {
            return &self.f * p * self.f.transpose();
        };
        let n = rows.len();
        // FP column by column, then (FP)Fᵀ by accumulating columns of FP.
        let mut fp = DMatrix::zeros(n, n);
        for c in 0..n {
            let pc = p.column(c);
            let mut out = fp.column_mut(c);
            for (i, row) in rows.iter().enumerate() {
                out[i] = row.iter().map(|&(j, v)| v * pc[j]).sum();
            }
        }
        let mut result = DMatrix::zeros(n, n);
        for (k, row) in rows.iter().enumerate() {
            let mut out = result.column_mut(k);
            for &(j, v) in row {
                out.axpy(v, &fp.column(j), 1.0);
            }
        }
        result
    }
}

/// Superposition predictor for a uniform AR coefficient.
pub fn build_f(lambda: &TransitionMatrix, alpha: f64) -> Result<PredictorMatrix> {
    if !(alpha.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("|alpha| must be < 1, got {alpha}")));
    }
    let f = PredictorMatrix::new(lambda.as_matrix().transpose() * alpha)?;
    // The induced 1-norm bounds the spectral radius.
    let norm1 = f.f.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    if !(norm1 < 1.0) {
        return Err(Error::InvalidParameter(format!("predictor is not contractive (1-norm {norm1})")));
    }
    Ok(f)
}

/// Which predictive pursuit runs in the measurement update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// PrOMP, giving DIP.
    Plain,
    /// rPrOMP, giving rDIP.
    Robust,
}

/// Filtered estimate after a measurement update.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    pub x_hat: DVector<f64>,
    pub p: DMatrix<f64>,
    /// Support detected by the measurement update, in selection order.
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionState {
    pub x_pred: DVector<f64>,
    pub p_pred: DMatrix<f64>,
}

impl PredictionState {
    /// Zero mean with isotropic variance `sigma_x2`.
    pub fn isotropic(n: usize, sigma_x2: f64) -> Self {
        Self { x_pred: DVector::zeros(n), p_pred: DMatrix::identity(n, n) * sigma_x2 }
    }

    fn prior(&self) -> Result<Prior> {
        Prior::new(self.x_pred.clone(), self.p_pred.clone())
    }
}

/// Posterior covariance on `support` with the prediction kept on the
/// complement and the cross blocks zeroed.
fn blockwise_covariance(p_pred: &DMatrix<f64>, support: &[usize], posterior: &DMatrix<f64>) -> DMatrix<f64> {
    let mut p = p_pred.clone();
    for &i in support {
        p.row_mut(i).fill(0.0);
        p.column_mut(i).fill(0.0);
    }
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            p[(i, j)] = posterior[(a, b)];
        }
    }
    p
}

/// Run predictive pursuit against the prediction and update the covariance
/// block-wise on the detected support.
pub fn measurement_update(
    y: &DVector<f64>,
    h: &DMatrix<f64>,
    r_inv: &DMatrix<f64>,
    pred: &PredictionState,
    k_max: usize,
    variant: Variant,
) -> Result<FilterState> {
    let prior = pred.prior()?;
    let rec = match variant {
        Variant::Plain => promp(y, h, r_inv, &prior, k_max)?,
        Variant::Robust => rpromp(y, h, r_inv, &prior, k_max)?,
    };
    if rec.support.is_empty() {
        return Ok(FilterState { x_hat: DVector::zeros(h.ncols()), p: pred.p_pred.clone(), support: Vec::new() });
    }
    let est = mmse_rec_with_cov(y, h, r_inv, &prior, &rec.support)?;
    let p = blockwise_covariance(&pred.p_pred, &rec.support, &est.cov);
    Ok(FilterState { x_hat: rec.x_hat, p, support: rec.support })
}

/// `x⁻ = F x̂`, `P⁻ = F P Fᵀ + Q` with `Q` given by its diagonal.
pub fn predict(state: &FilterState, f: &PredictorMatrix, q_diag: &DVector<f64>) -> Result<PredictionState> {
    let n = f.dim();
    if state.x_hat.len() != n || q_diag.len() != n || state.p.shape() != (n, n) {
        return Err(Error::InvalidDimension("predict: F, P, x̂ and Q disagree in size".into()));
    }
    if let Some(bad) = q_diag.iter().find(|q| !(**q > 0.0)) {
        return Err(Error::InvalidParameter(format!("process noise variance {bad} must be positive")));
    }
    let x_pred = f.apply(&state.x_hat);
    let mut p_pred = f.sandwich(&state.p);
    for i in 0..n {
        p_pred[(i, i)] += q_diag[i];
    }
    symmetrize(&mut p_pred);
    Ok(PredictionState { x_pred, p_pred })
}

/// Dynamic iterative pursuit over a measurement sequence. Returns one filtered
/// state per snapshot.
#[allow(clippy::too_many_arguments)]
pub fn dip_run(
    measurements: &[DVector<f64>],
    h: &DMatrix<f64>,
    r_inv: &DMatrix<f64>,
    f: &PredictorMatrix,
    q_diag: &DVector<f64>,
    init: &PredictionState,
    k_max: usize,
    variant: Variant,
) -> Result<Vec<FilterState>> {
    let mut out = Vec::with_capacity(measurements.len());
    let mut pred = init.clone();
    for (t, y) in measurements.iter().enumerate() {
        let state = measurement_update(y, h, r_inv, &pred, k_max, variant)?;
        if t + 1 < measurements.len() {
            pred = predict(&state, f, q_diag)?;
        }
        out.push(state);
    }
    Ok(out)
}

/// Kalman filter that is told the true support of every snapshot and the
/// realized coordinate moves between them.
///
/// The update is the MMSE fit restricted to the true support; the prediction
/// applies the realized jump `x⁻_i = α x̂_j` for each move `j → i` and injects
/// process noise only on the destinations.
pub fn genie_kf_run(
    realization: &ProcessRealization,
    r_inv: &DMatrix<f64>,
    q_diag: &DVector<f64>,
    alpha: f64,
    init: &PredictionState,
) -> Result<Vec<FilterState>> {
    let h: &DMatrix<f64> = &realization.h;
    let n = h.ncols();
    if q_diag.len() != n || init.x_pred.len() != n {
        return Err(Error::InvalidDimension("genie filter: state sizes disagree".into()));
    }
    if realization.maps.len() + 1 < realization.measurements.len() {
        return Err(Error::InvalidState("realization lacks transition maps".into()));
    }
    let mut out = Vec::with_capacity(realization.measurements.len());
    // Off-support prior entries are never read, so the prior is built
    // without the positivity check on the full diagonal.
    let mut prior = Prior { x_pred: init.x_pred.clone(), p_pred: init.p_pred.clone() };
    for (t, y) in realization.measurements.iter().enumerate() {
        let support = &realization.supports[t];
        let state = if support.is_empty() {
            FilterState { x_hat: DVector::zeros(n), p: prior.p_pred.clone(), support: Vec::new() }
        } else {
            let est = mmse_rec_with_cov(y, h, r_inv, &prior, support)?;
            FilterState {
                x_hat: scatter(n, support, &est.x),
                p: blockwise_covariance(&prior.p_pred, support, &est.cov),
                support: support.clone(),
            }
        };
        if t + 1 < realization.measurements.len() {
            let pairs = &realization.maps[t].pairs;
            let mut x_pred = DVector::zeros(n);
            let mut p_pred = DMatrix::zeros(n, n);
            for &(j, i) in pairs {
                x_pred[i] = alpha * state.x_hat[j];
                for &(j2, i2) in pairs {
                    p_pred[(i, i2)] = alpha * alpha * state.p[(j, j2)];
                }
            }
            for &(_, i) in pairs {
                p_pred[(i, i)] += q_diag[i];
            }
            prior = Prior { x_pred, p_pred };
        }
        out.push(state);
    }
    Ok(out)
}
