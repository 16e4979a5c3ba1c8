use nalgebra::{DMatrix, DVector};

use super::{check_inputs, exhausted, strictly_decreased, RecoveryResult};
use crate::error::{Error, Result};
use crate::linalg::{argmax, columns, scatter};

/// Orthogonal matching pursuit.
///
/// Selects the column with the largest matched-filter output `|h_iᵀ r|` and
/// re-fits all selected coefficients by least squares.
pub fn omp(y: &DVector<f64>, h: &DMatrix<f64>, k_max: usize) -> Result<RecoveryResult> {
    check_inputs(y, h, k_max)?;
    let n = h.ncols();
    let y_norm = y.norm();
    let mut best = RecoveryResult::empty(n, y);
    let mut residual = y.clone();
    let mut in_support = vec![false; n];

    while best.support.len() < k_max && !exhausted(best.residual_norm, y_norm) {
        let corr = h.tr_mul(&residual);
        let pick = argmax((0..n).filter(|&i| !in_support[i]).map(|i| (i, corr[i].abs())));
        let Some(pick) = pick else { break };

        let mut trial = best.support.clone();
        trial.push(pick);
        let h_sel = columns(h, &trial);
        let coeffs = least_squares(&h_sel, y)?;
        let r = y - &h_sel * &coeffs;
        let r_norm = r.norm();
        if !strictly_decreased(r_norm, best.residual_norm, y_norm) {
            break;
        }
        in_support[pick] = true;
        best = RecoveryResult { x_hat: scatter(n, &trial, &coeffs), support: trial, residual_norm: r_norm };
        residual = r;
    }
    Ok(best)
}

/// `argmin ‖y - A c‖` via thin QR; a vanishing pivot means rank deficiency.
fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let qr = a.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    let tol = f64::EPSILON * a.nrows().max(a.ncols()) as f64 * scale.max(f64::MIN_POSITIVE);
    if r.diagonal().iter().any(|d| d.abs() <= tol) {
        return Err(Error::Numeric(format!("selected columns are rank deficient ({} columns)", a.ncols())));
    }
    let qty = qr.q().tr_mul(y);
    r.solve_upper_triangular(&qty).ok_or_else(|| Error::Numeric("triangular solve failed".into()))
}
