use nalgebra::DVector;

use crate::error::{Error, Result};

/// Value written for an SRER whose error energy is exactly zero.
pub const SRER_CAP_DB: f64 = 999.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Measurement-noise variance giving the requested SMNR for unit-power
/// states: `1 / (M · SMNR)`.
pub fn sigma_n2_from_smnr(m: usize, smnr_db: f64) -> f64 {
    1.0 / (m as f64 * db_to_linear(smnr_db))
}

/// Signal-to-reconstruction-error ratio of one trajectory (linear scale).
/// A perfect reconstruction gives `f64::INFINITY`.
pub fn srer(truth: &[DVector<f64>], estimates: &[DVector<f64>]) -> Result<f64> {
    let mut acc = SrerAccumulator::default();
    acc.add(truth, estimates)?;
    Ok(acc.ratio())
}

/// Pooled signal and error energies. Energies from several runs are summed
/// before the ratio is taken.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SrerAccumulator {
    pub signal: f64,
    pub error: f64,
}

impl SrerAccumulator {
    pub fn add(&mut self, truth: &[DVector<f64>], estimates: &[DVector<f64>]) -> Result<()> {
        if truth.len() != estimates.len() {
            return Err(Error::InvalidDimension(format!(
                "{} true states but {} estimates",
                truth.len(),
                estimates.len()
            )));
        }
        for (x, x_hat) in truth.iter().zip(estimates) {
            if x.len() != x_hat.len() {
                return Err(Error::InvalidDimension(format!(
                    "state has {} entries, estimate {}",
                    x.len(),
                    x_hat.len()
                )));
            }
            self.signal += x.norm_squared();
            self.error += (x - x_hat).norm_squared();
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &SrerAccumulator) {
        self.signal += other.signal;
        self.error += other.error;
    }

    pub fn ratio(&self) -> f64 {
        if self.error == 0.0 {
            f64::INFINITY
        } else {
            self.signal / self.error
        }
    }

    /// SRER in dB and whether it had to be clamped to `±SRER_CAP_DB`.
    pub fn db_capped(&self) -> (f64, bool) {
        let db = linear_to_db(self.ratio());
        if db.is_finite() {
            (db, false)
        } else if db > 0.0 {
            (SRER_CAP_DB, true)
        } else {
            (-SRER_CAP_DB, true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn noise_variance_from_smnr() {
        assert!((sigma_n2_from_smnr(50, 10.0) - 0.002).abs() < 1e-15);
        assert_eq!(sigma_n2_from_smnr(1, 0.0), 1.0);
        assert!((sigma_n2_from_smnr(200, 20.0) - 5e-5).abs() < 1e-18);
    }

    #[test]
    fn srer_reference_values() {
        let truth = vec![v(&[1.0, -2.0]), v(&[0.5, 0.0])];
        let zeros = vec![v(&[0.0, 0.0]), v(&[0.0, 0.0])];
        assert_eq!(srer(&truth, &zeros).unwrap(), 1.0);
        assert_eq!(srer(&truth, &truth).unwrap(), f64::INFINITY);
        let ratio = srer(&[v(&[1.0, 0.0])], &[v(&[0.5, 0.0])]).unwrap();
        assert_eq!(ratio, 4.0);
        assert!((linear_to_db(ratio) - 6.020_599_913_279_624).abs() < 1e-12);
        assert!(srer(&truth, &zeros[..1]).is_err());
    }

    #[test]
    fn pooling_is_ratio_of_sums() {
        // Two runs with very different per-run ratios; naive two-pass oracle.
        let runs = [(vec![v(&[2.0, 0.0])], vec![v(&[1.0, 0.0])]), (vec![v(&[0.0, 1.0])], vec![v(&[0.0, 0.9])])];
        let mut acc = SrerAccumulator::default();
        for (x, e) in &runs {
            let mut one = SrerAccumulator::default();
            one.add(x, e).unwrap();
            acc.merge(&one);
        }
        let signal: f64 = runs.iter().flat_map(|r| r.0.iter()).map(|x| x.norm_squared()).sum();
        let error: f64 =
            runs.iter().flat_map(|r| r.0.iter().zip(r.1.iter())).map(|(x, e)| (x - e).norm_squared()).sum();
        assert!((acc.ratio() - signal / error).abs() < 1e-12);
        let mean_of_ratios = (4.0 / 1.0 + 1.0 / 0.01) / 2.0;
        assert!((acc.ratio() - mean_of_ratios).abs() > 1.0);
    }

    #[test]
    fn capped_output() {
        let acc = SrerAccumulator { signal: 3.0, error: 0.0 };
        assert_eq!(acc.db_capped(), (SRER_CAP_DB, true));
        let acc = SrerAccumulator { signal: 3.0, error: 3.0 };
        assert_eq!(acc.db_capped(), (0.0, false));
    }

    #[test]
    fn db_round_trip() {
        for db in [-30.0, -5.0, 0.0, 3.3, 20.0, 45.5] {
            assert!((linear_to_db(db_to_linear(db)) - db).abs() < 1e-12);
        }
    }
}
