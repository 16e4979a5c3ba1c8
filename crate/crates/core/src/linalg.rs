//! Small dense helpers shared by the pursuit and tracking code.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Cholesky factorization that reports a non-positive pivot as a numeric error.
pub fn cholesky(a: DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(a).ok_or_else(|| Error::Numeric(format!("{what} is not positive definite")))
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse(a: DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    let mut inv = cholesky(a, what)?.inverse();
    symmetrize(&mut inv);
    Ok(inv)
}

/// Replace `a` by `(a + aᵀ) / 2`.
pub fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// Columns of `h` listed in `idx`, in that order.
pub fn columns(h: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    h.select_columns(idx)
}

/// The `idx × idx` principal submatrix.
pub fn principal(a: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| a[(idx[r], idx[c])])
}

pub fn gather(x: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| x[i]))
}

/// Expand a coefficient vector on `idx` into a length-`n` vector, zero elsewhere.
pub fn scatter(n: usize, idx: &[usize], values: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(n);
    for (k, &i) in idx.iter().enumerate() {
        out[i] = values[k];
    }
    out
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Index of the largest value, lowest index on ties. `NaN` never wins.
pub fn argmax<I: IntoIterator<Item = (usize, f64)>>(items: I) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in items {
        match best {
            Some((_, b)) if v <= b => {}
            _ if v.is_nan() => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}
