use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;

/// Row-stochastic matrix whose entry `(j, i)` is the probability that active
/// coordinate `j` moves to coordinate `i` at the next snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    probs: DMatrix<f64>,
}

impl TransitionMatrix {
    pub fn new(probs: DMatrix<f64>) -> Result<Self> {
        if probs.nrows() != probs.ncols() || probs.nrows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "transition matrix must be square and non-empty, got {}x{}",
                probs.nrows(),
                probs.ncols()
            )));
        }
        for (j, row) in probs.row_iter().enumerate() {
            if let Some(p) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(Error::InvalidParameter(format!("transition probability {p} in row {j} outside [0, 1]")));
            }
            let sum: f64 = row.sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidParameter(format!("row {j} sums to {sum}, not 1")));
            }
        }
        Ok(Self { probs })
    }

    pub fn dim(&self) -> usize {
        self.probs.nrows()
    }

    /// Probability of `from -> to`.
    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.probs[(from, to)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.probs
    }

    /// Draw the destination of a coordinate currently at `from`.
    fn sample_destination<R: Rng + ?Sized>(&self, from: usize, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last_positive = from;
        for (i, &p) in self.probs.row(from).iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last_positive = i;
                if u < acc {
                    return i;
                }
            }
        }
        // Row sums may fall a rounding error short of 1.
        last_positive
    }
}

/// Slowly varying pattern: stay with probability 0.90, otherwise hop to an
/// adjacent coordinate (0.05 each way, 0.10 toward the interior at the edges).
pub fn build_lambda_neighbor(n: usize) -> Result<TransitionMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("neighbor transitions need N >= 2, got {n}")));
    }
    let mut probs = DMatrix::zeros(n, n);
    for j in 0..n {
        probs[(j, j)] = 0.90;
        if j == 0 {
            probs[(j, 1)] = 0.10;
        } else if j == n - 1 {
            probs[(j, n - 2)] = 0.10;
        } else {
            probs[(j, j - 1)] = 0.05;
            probs[(j, j + 1)] = 0.05;
        }
    }
    TransitionMatrix::new(probs)
}

/// Mixture between a static pattern (`nu = 0`) and equiprobable hopping
/// (`nu = 1`): diagonal `1 - nu (N-1)/N`, every off-diagonal `nu / N`.
pub fn build_lambda_mixture(n: usize, nu: f64) -> Result<TransitionMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("mixture transitions need N >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::InvalidParameter(format!("mixture factor must lie in [0, 1], got {nu}")));
    }
    let nf = n as f64;
    let off = nu / nf;
    let diag = 1.0 - nu * (nf - 1.0) / nf;
    TransitionMatrix::new(DMatrix::from_fn(n, n, |j, i| if i == j { diag } else { off }))
}

/// Degenerate transitions: the support never moves.
pub fn build_lambda_static(n: usize) -> TransitionMatrix {
    TransitionMatrix { probs: DMatrix::identity(n, n) }
}

/// Realized coordinate moves for one time step, as `(source, destination)`
/// pairs ordered by source.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransitionMap {
    pub pairs: Vec<(usize, usize)>,
}

impl TransitionMap {
    pub fn destinations(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(_, i)| i)
    }
}

/// Move every active coordinate through one Markov step.
///
/// Each source draws its destination independently. When several sources land
/// on the same coordinate the lowest-index source keeps it; the others, in
/// ascending source order, are sent to a coordinate drawn uniformly from those
/// still unoccupied. The support size is therefore preserved.
pub fn step_support<R: Rng + ?Sized>(
    support: &[usize],
    lambda: &TransitionMatrix,
    rng: &mut R,
) -> Result<(Vec<usize>, TransitionMap)> {
    if support.is_empty() {
        return Err(Error::InvalidState("cannot step an empty support".into()));
    }
    let n = lambda.dim();
    let mut sources = support.to_vec();
    sources.sort_unstable();
    if let Some(&bad) = sources.iter().find(|&&j| j >= n) {
        return Err(Error::InvalidState(format!("support index {bad} outside 0..{n}")));
    }
    if sources.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidState("support indices must be distinct".into()));
    }

    let drawn: Vec<usize> = sources.iter().map(|&j| lambda.sample_destination(j, rng)).collect();

    let mut occupied = vec![false; n];
    let mut losers = Vec::new();
    for (slot, &dest) in drawn.iter().enumerate() {
        if occupied[dest] {
            losers.push(slot);
        } else {
            occupied[dest] = true;
        }
    }

    let mut dests = drawn;
    if !losers.is_empty() {
        let mut free: Vec<usize> = (0..n).filter(|&i| !occupied[i]).collect();
        for slot in losers {
            let pick = rng.random_range(0..free.len());
            dests[slot] = free.remove(pick);
        }
    }

    let pairs: Vec<(usize, usize)> = sources.iter().copied().zip(dests.iter().copied()).collect();
    let mut next = dests;
    next.sort_unstable();
    Ok((next, TransitionMap { pairs }))
}
