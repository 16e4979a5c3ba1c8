use nalgebra::{DMatrix, DVector};

use super::{check_inputs, exhausted, strictly_decreased, Prior, RecoveryResult};
use crate::error::{Error, Result};
use crate::linalg::{argmax, columns, gather, principal, scatter, spd_inverse, symmetrize};

/// Bookkeeping for one predictive pursuit call.
///
/// `d_inv` is the inverse covariance of the residual under the hypothesis of
/// one more active coefficient: measurement noise plus the error variances of
/// the coefficients detected so far. It starts at `R⁻¹` and only ever receives
/// rank-one updates. `d_inv_h = D⁻¹ H` is carried along with it.
#[derive(Debug, Clone)]
pub struct PursuitState {
    residual: DVector<f64>,
    support: Vec<usize>,
    sigma2: Vec<f64>,
    d_inv: DMatrix<f64>,
    d_inv_h: DMatrix<f64>,
}

impl PursuitState {
    pub fn new(y: &DVector<f64>, h: &DMatrix<f64>, r_inv: &DMatrix<f64>) -> Result<Self> {
        let m = h.nrows();
        if r_inv.shape() != (m, m) || y.len() != m {
            return Err(Error::InvalidDimension(format!(
                "R⁻¹ is {}x{} and y has {} entries, expected M = {m}",
                r_inv.nrows(),
                r_inv.ncols(),
                y.len()
            )));
        }
        Ok(Self {
            residual: y.clone(),
            support: Vec::new(),
            sigma2: Vec::new(),
            d_inv: r_inv.clone(),
            d_inv_h: r_inv * h,
        })
    }

    pub fn residual(&self) -> &DVector<f64> {
        &self.residual
    }

    /// Detected indices in selection order.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Error variance recorded for each detected index when it was added.
    pub fn sigma2(&self) -> &[f64] {
        &self.sigma2
    }

    pub fn d_inv(&self) -> &DMatrix<f64> {
        &self.d_inv
    }

    /// Record a newly detected index with its posterior error variance and the
    /// residual after the joint re-estimate.
    pub fn commit(&mut self, h: &DMatrix<f64>, index: usize, sigma2: f64, residual: DVector<f64>) {
        let u = self.d_inv_h.column(index).into_owned();
        let denom = 1.0 + sigma2 * h.column(index).dot(&u);
        if sigma2 > 0.0 && denom.is_finite() {
            let c = sigma2 / denom;
            // D⁻¹H loses c·u (uᵀH); uᵀH = (Hᵀu)ᵀ.
            let ut_h = h.tr_mul(&u);
            self.d_inv_h.ger(-c, &u, &ut_h, 1.0);
            self.d_inv = update_cov_inv(&self.d_inv, &h.column(index).into_owned(), sigma2);
        }
        self.support.push(index);
        self.sigma2.push(sigma2);
        self.residual = residual;
    }
}

/// Rank-one update of an inverse covariance: returns `(D + σ² h hᵀ)⁻¹` given
/// `D⁻¹`, via Sherman–Morrison.
pub fn update_cov_inv(d_inv: &DMatrix<f64>, h: &DVector<f64>, sigma2: f64) -> DMatrix<f64> {
    let u = d_inv * h;
    let denom = 1.0 + sigma2 * h.dot(&u);
    let mut out = d_inv.clone();
    if sigma2 == 0.0 || !denom.is_finite() {
        return out;
    }
    out.ger(-sigma2 / denom, &u, &u, 1.0);
    symmetrize(&mut out);
    out
}

/// Signal-to-prediction-error ratio of every coordinate, conditioned on the
/// current residual. Entries for already-detected indices are `-∞`.
///
/// For candidate `i` with prior variance `p` and `q = h_iᵀ D⁻¹ h_i`, the gain
/// is `g = D⁻¹ h_i / (1/p + q)`, the conditional mean
/// `μ = x⁻_i + gᵀ (r - h_i x⁻_i)`, the conditional variance `(1 - gᵀ h_i) p`,
/// and the score `(μ² + σ²) / p`.
pub fn sper_scores(state: &PursuitState, prior: &Prior, h: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = h.ncols();
    if prior.dim() != n {
        return Err(Error::InvalidDimension(format!(
            "prior has {} entries but sensing matrix has {n} columns",
            prior.dim()
        )));
    }
    let w = &state.d_inv_h;
    let proj = w.tr_mul(&state.residual);
    let mut scores = vec![f64::NEG_INFINITY; n];
    let mut taken = vec![false; n];
    for &i in &state.support {
        taken[i] = true;
    }
    for i in (0..n).filter(|&i| !taken[i]) {
        let p = prior.p_pred[(i, i)];
        if !(p > 0.0) {
            return Err(Error::InvalidPrior { index: i, variance: p });
        }
        let q = h.column(i).dot(&w.column(i));
        let denom = 1.0 / p + q;
        let xp = prior.x_pred[i];
        let mu = xp + (proj[i] - q * xp) / denom;
        let var = (1.0 - q / denom) * p;
        scores[i] = (mu * mu + var) / p;
    }
    Ok(scores)
}

/// Linear MMSE estimate on a fixed support together with its posterior error
/// covariance `(S⁻¹ + H_Iᵀ R⁻¹ H_I)⁻¹`, `S = P⁻[I, I]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmseEstimate {
    /// Coefficients in the order of the requested support.
    pub x: DVector<f64>,
    pub cov: DMatrix<f64>,
}

/// Joint re-estimate of the coefficients on `support`; the weighted
/// least-squares fit of the measurement and the prior prediction.
pub fn mmse_rec(
    y: &DVector<f64>,
    h: &DMatrix<f64>,
    r_inv: &DMatrix<f64>,
    prior: &Prior,
    support: &[usize],
) -> Result<DVector<f64>> {
    mmse_rec_with_cov(y, h, r_inv, prior, support).map(|e| e.x)
}

pub fn mmse_rec_with_cov(
    y: &DVector<f64>,
    h: &DMatrix<f64>,
    r_inv: &DMatrix<f64>,
    prior: &Prior,
    support: &[usize],
) -> Result<MmseEstimate> {
    if support.is_empty() {
        return Err(Error::InvalidState("MMSE reconstruction needs a non-empty support".into()));
    }
    let s_inv = spd_inverse(principal(&prior.p_pred, support), "prior covariance block S")?;
    let h_sel = columns(h, support);
    let ht_rinv = h_sel.tr_mul(r_inv);
    let info = s_inv + &ht_rinv * &h_sel;
    let cov = spd_inverse(info, "posterior information matrix")?;
    let x_prior = gather(&prior.x_pred, support);
    let innovation = y - &h_sel * &x_prior;
    let x = x_prior + &cov * (ht_rinv * innovation);
    Ok(MmseEstimate { x, cov })
}

/// Predictive orthogonal matching pursuit.
pub fn promp(
    y: &DVector<f64>,
    h: &DMatrix<f64>,
    r_inv: &DMatrix<f64>,
    prior: &Prior,
    k_max: usize,
) -> Result<RecoveryResult> {
    predictive_pursuit(y, h, r_inv, prior, k_max, |state, _| {
        let scores = sper_scores(state, prior, h)?;
        Ok(argmax(scores.into_iter().enumerate()))
    })
}

/// Robust predictive OMP.
///
/// Instead of committing to the top-scoring index, each stage hypothesizes the
/// `k_max - |I|` best-scoring candidates together with the current support,
/// re-estimates them jointly and commits the candidate with the largest
/// estimated magnitude.
pub fn rpromp(
    y: &DVector<f64>,
    h: &DMatrix<f64>,
    r_inv: &DMatrix<f64>,
    prior: &Prior,
    k_max: usize,
) -> Result<RecoveryResult> {
    predictive_pursuit(y, h, r_inv, prior, k_max, |state, remaining| {
        let scores = sper_scores(state, prior, h)?;
        let mut candidates: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] > f64::NEG_INFINITY).collect();
        candidates.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        candidates.truncate(remaining);
        if candidates.is_empty() {
            return Ok(None);
        }
        candidates.sort_unstable();

        let mut hypothesis = state.support().to_vec();
        let offset = hypothesis.len();
        hypothesis.extend_from_slice(&candidates);
        let trial = mmse_rec(y, h, r_inv, prior, &hypothesis)?;
        let pick = argmax(candidates.iter().enumerate().map(|(k, &i)| (i, trial[offset + k].abs())));
        Ok(pick)
    })
}

/// Loop shared by PrOMP and rPrOMP; `select` proposes the next index given
/// the state and the number of slots left.
fn predictive_pursuit<F>(
    y: &DVector<f64>,
    h: &DMatrix<f64>,
    r_inv: &DMatrix<f64>,
    prior: &Prior,
    k_max: usize,
    mut select: F,
) -> Result<RecoveryResult>
where
    F: FnMut(&PursuitState, usize) -> Result<Option<usize>>,
{
    check_inputs(y, h, k_max)?;
    let n = h.ncols();
    if prior.dim() != n {
        return Err(Error::InvalidDimension(format!(
            "prior has {} entries but sensing matrix has {n} columns",
            prior.dim()
        )));
    }
    let y_norm = y.norm();
    let mut state = PursuitState::new(y, h, r_inv)?;
    let mut best = RecoveryResult::empty(n, y);

    while state.support().len() < k_max && !exhausted(best.residual_norm, y_norm) {
        let Some(pick) = select(&state, k_max - state.support().len())? else { break };
        let mut trial = state.support().to_vec();
        trial.push(pick);
        let est = mmse_rec_with_cov(y, h, r_inv, prior, &trial)?;
        let r = y - columns(h, &trial) * &est.x;
        let r_norm = r.norm();
        if !strictly_decreased(r_norm, best.residual_norm, y_norm) {
            break;
        }
        let last = trial.len() - 1;
        best = RecoveryResult { x_hat: scatter(n, &trial, &est.x), support: trial, residual_norm: r_norm };
        state.commit(h, pick, est.cov[(last, last)], r);
    }
    Ok(best)
}
