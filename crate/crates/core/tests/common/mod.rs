//! Independent reference computations used by the integration suites. Nothing
//! here calls into the algorithm paths it is compared against.
#![allow(dead_code)]

use dip_core::rng::{run_stream, Stream};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn stream(seed: u64, run: u64) -> Stream {
    run_stream(seed, run)
}

pub fn gauss_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gauss_vector<R: Rng>(rng: &mut R, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

/// Random orthogonal basis with eigenvalues log-uniform in `[1, 10^log10_cond]`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize, log10_cond: f64) -> DMatrix<f64> {
    let q = gauss_matrix(rng, n, n).qr().q();
    let mut eig: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random::<f64>() * log10_cond)).collect();
    eig[0] = 1.0;
    eig[n - 1] = 10f64.powf(log10_cond);
    &q * DMatrix::from_diagonal(&DVector::from_vec(eig)) * q.transpose()
}

/// Unit-norm Gaussian columns, built without the library generator.
pub fn unit_columns<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    let mut h = gauss_matrix(rng, rows, cols);
    for mut c in h.column_iter_mut() {
        let n = c.norm();
        c /= n;
    }
    h
}

/// Weighted least squares on the stacked system `[H_I; I] x ≈ [y; x⁻_I]`
/// with weight `R⁻¹ ⊕ S⁻¹`, solved through LU normal equations.
pub fn weighted_ls(
    y: &DVector<f64>,
    h: &DMatrix<f64>,
    r_inv: &DMatrix<f64>,
    x_pred: &DVector<f64>,
    p_pred: &DMatrix<f64>,
    support: &[usize],
) -> DVector<f64> {
    let k = support.len();
    let m = y.len();
    let mut a = DMatrix::zeros(m + k, k);
    let mut b = DVector::zeros(m + k);
    for (c, &i) in support.iter().enumerate() {
        for r in 0..m {
            a[(r, c)] = h[(r, i)];
        }
        a[(m + c, c)] = 1.0;
        b[m + c] = x_pred[i];
    }
    b.rows_mut(0, m).copy_from(y);
    let s = DMatrix::from_fn(k, k, |r, c| p_pred[(support[r], support[c])]);
    let s_inv = s.lu().try_inverse().unwrap();
    let mut w = DMatrix::zeros(m + k, m + k);
    w.view_mut((0, 0), (m, m)).copy_from(r_inv);
    w.view_mut((m, m), (k, k)).copy_from(&s_inv);
    let lhs = a.transpose() * &w * &a;
    let rhs = a.transpose() * &w * &b;
    lhs.lu().solve(&rhs).unwrap()
}

/// Weighted cost of `x` in the stacked problem above.
pub fn weighted_cost(
    x: &DVector<f64>,
    y: &DVector<f64>,
    h: &DMatrix<f64>,
    r_inv: &DMatrix<f64>,
    x_pred: &DVector<f64>,
    p_pred: &DMatrix<f64>,
    support: &[usize],
) -> f64 {
    let h_sel = DMatrix::from_fn(h.nrows(), support.len(), |r, c| h[(r, support[c])]);
    let e_meas = y - h_sel * x;
    let e_prior = DVector::from_fn(support.len(), |r, _| x_pred[support[r]] - x[r]);
    let s = DMatrix::from_fn(support.len(), support.len(), |r, c| p_pred[(support[r], support[c])]);
    let s_inv = s.lu().try_inverse().unwrap();
    (e_meas.transpose() * r_inv * &e_meas)[(0, 0)] + (e_prior.transpose() * s_inv * &e_prior)[(0, 0)]
}

/// `F P Fᵀ + diag(q)` by explicit index loops.
pub fn naive_predict_cov(f: &DMatrix<f64>, p: &DMatrix<f64>, q: &DVector<f64>) -> DMatrix<f64> {
    let n = f.nrows();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    acc += f[(i, a)] * p[(a, b)] * f[(k, b)];
                }
            }
            out[(i, k)] = acc + if i == k { q[i] } else { 0.0 };
        }
    }
    out
}

/// All size-`k` subsets of `0..n`, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Minimum-residual support of size `k` by enumeration, with its SVD
/// least-squares coefficients.
pub fn exhaustive_support(y: &DVector<f64>, h: &DMatrix<f64>, k: usize) -> (Vec<usize>, DVector<f64>) {
    let mut best: Option<(f64, Vec<usize>, DVector<f64>)> = None;
    for s in subsets(h.ncols(), k) {
        let h_sel = h.select_columns(&s);
        let coef = h_sel.clone().svd(true, true).solve(y, 1e-14).unwrap();
        let res = (y - h_sel * &coef).norm();
        if best.as_ref().is_none_or(|b| res < b.0) {
            best = Some((res, s, coef));
        }
    }
    let (_, s, c) = best.unwrap();
    (s, c)
}

/// Textbook covariance-form Kalman filter for `x' = αx + w`, `y = Hx + n`.
pub fn textbook_kf(
    ys: &[DVector<f64>],
    h: &DMatrix<f64>,
    r: &DMatrix<f64>,
    q: &DVector<f64>,
    alpha: f64,
    x0: &DVector<f64>,
    p0: &DMatrix<f64>,
) -> Vec<(DVector<f64>, DMatrix<f64>)> {
    let n = x0.len();
    let mut x_pred = x0.clone();
    let mut p_pred = p0.clone();
    let mut out = Vec::new();
    for y in ys {
        let s = h * &p_pred * h.transpose() + r;
        let gain = &p_pred * h.transpose() * s.lu().try_inverse().unwrap();
        let x = &x_pred + &gain * (y - h * &x_pred);
        let p = (DMatrix::identity(n, n) - &gain * h) * &p_pred;
        x_pred = &x * alpha;
        p_pred = &p * (alpha * alpha) + DMatrix::from_diagonal(q);
        out.push((x, p));
    }
    out
}

/// Textbook OMP: unnormalized correlation argmax, least squares by SVD.
/// Returns the sorted support.
pub fn textbook_omp(y: &DVector<f64>, h: &DMatrix<f64>, k: usize) -> Vec<usize> {
    let mut support: Vec<usize> = Vec::new();
    let mut r = y.clone();
    for _ in 0..k {
        let mut best = None;
        for i in (0..h.ncols()).filter(|i| !support.contains(i)) {
            let c = h.column(i).dot(&r).abs();
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((i, c));
            }
        }
        support.push(best.unwrap().0);
        let hs = h.select_columns(&support);
        let coef = hs.clone().svd(true, true).solve(y, 1e-14).unwrap();
        r = y - hs * coef;
    }
    support.sort_unstable();
    support
}
