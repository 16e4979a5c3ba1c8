use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{step_support, ModelParams, TransitionMap, TransitionMatrix};
use crate::error::{Error, Result};

/// M×N sensing matrix with unit-norm columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix(DMatrix<f64>);

impl SensingMatrix {
    /// Normalize the columns of `h`. Fails on a zero column.
    pub fn from_unnormalized(mut h: DMatrix<f64>) -> Result<Self> {
        for (c, mut col) in h.column_iter_mut().enumerate() {
            let norm = col.norm();
            if !(norm > 0.0) {
                return Err(Error::Numeric(format!("sensing column {c} has zero norm")));
            }
            col /= norm;
        }
        Ok(Self(h))
    }

    /// Wrap a matrix whose columns are already normalized.
    pub(crate) fn from_raw(h: DMatrix<f64>) -> Self {
        Self(h)
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

impl Deref for SensingMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Gaussian sensing matrix with unit-norm columns. Entries are drawn column by
/// column before scaling.
pub fn generate_sensing_matrix<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<SensingMatrix> {
    if m == 0 || m >= n {
        return Err(Error::InvalidDimension(format!("need 0 < M < N, got M={m}, N={n}")));
    }
    let raw = DMatrix::from_iterator(m, n, (0..m * n).map(|_| rng.sample::<f64, _>(StandardNormal)));
    SensingMatrix::from_unnormalized(raw)
}

/// `y = H x + n` with white Gaussian noise of variance `sigma_n2`.
///
/// M noise samples are consumed even when `sigma_n2` is zero, so the stream
/// position does not depend on the noise level.
pub fn measure<R: Rng + ?Sized>(
    h: &DMatrix<f64>,
    x: &DVector<f64>,
    sigma_n2: f64,
    rng: &mut R,
) -> Result<DVector<f64>> {
    if h.ncols() != x.len() {
        return Err(Error::InvalidDimension(format!(
            "sensing matrix has {} columns but state has {} entries",
            h.ncols(),
            x.len()
        )));
    }
    if !(sigma_n2 >= 0.0) {
        return Err(Error::InvalidParameter(format!("noise variance {sigma_n2} is negative")));
    }
    let sd = sigma_n2.sqrt();
    let mut y = h * x;
    for v in y.iter_mut() {
        *v += sd * rng.sample::<f64, _>(StandardNormal);
    }
    Ok(y)
}

/// Propagate the coefficients along a realized transition map: each
/// destination receives `alpha * x_source` plus a fresh innovation.
pub fn step_state<R: Rng + ?Sized>(
    x: &DVector<f64>,
    map: &TransitionMap,
    params: &ModelParams,
    rng: &mut R,
) -> DVector<f64> {
    let sd = params.sigma_w2.sqrt();
    let mut next = DVector::zeros(x.len());
    for &(j, i) in &map.pairs {
        next[i] = params.alpha * x[j] + sd * rng.sample::<f64, _>(StandardNormal);
    }
    next
}

/// Ground-truth trajectory of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessRealization {
    pub h: SensingMatrix,
    pub states: Vec<DVector<f64>>,
    /// Sorted support of each state.
    pub supports: Vec<Vec<usize>>,
    /// `maps[t]` moves `supports[t]` onto `supports[t + 1]`.
    pub maps: Vec<TransitionMap>,
    pub measurements: Vec<DVector<f64>>,
}

impl ProcessRealization {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Draw a sensing matrix and a full trajectory.
///
/// The initial support is a uniform size-K subset and its amplitudes follow
/// the stationary AR law `N(0, sigma_w2 / (1 - alpha²))`. Random numbers are
/// consumed in a fixed order: H, initial support, initial amplitudes, then per
/// snapshot the measurement noise followed by the next support and innovations.
pub fn simulate<R: Rng + ?Sized>(
    params: &ModelParams,
    lambda: &TransitionMatrix,
    rng: &mut R,
) -> Result<ProcessRealization> {
    params.validate()?;
    if lambda.dim() != params.n {
        return Err(Error::InvalidDimension(format!(
            "transition matrix is {0}x{0} but N = {1}",
            lambda.dim(),
            params.n
        )));
    }
    let h = generate_sensing_matrix(params.m, params.n, rng)?;

    let mut support = index::sample(rng, params.n, params.k).into_vec();
    support.sort_unstable();
    let sd_x = params.sigma_x2().sqrt();
    let mut x = DVector::zeros(params.n);
    for &i in &support {
        x[i] = sd_x * rng.sample::<f64, _>(StandardNormal);
    }

    let t_len = params.snapshots;
    let mut states = Vec::with_capacity(t_len);
    let mut supports = Vec::with_capacity(t_len);
    let mut maps = Vec::with_capacity(t_len.saturating_sub(1));
    let mut measurements = Vec::with_capacity(t_len);
    for t in 0..t_len {
        measurements.push(measure(&h, &x, params.sigma_n2, rng)?);
        if t + 1 < t_len {
            let (next_support, map) = step_support(&support, lambda, rng)?;
            let next_x = step_state(&x, &map, params, rng);
            states.push(std::mem::replace(&mut x, next_x));
            supports.push(std::mem::replace(&mut support, next_support));
            maps.push(map);
        }
    }
    states.push(x);
    supports.push(support);

    Ok(ProcessRealization { h, states, supports, maps, measurements })
}
