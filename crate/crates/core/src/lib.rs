//! Recovery of sparse signals whose support evolves as a Markov chain.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] draws transition matrices, supports, AR coefficient
//!   trajectories, Gaussian sensing matrices and noisy measurements.
//! * [`pursuit`] recovers one snapshot: OMP and the predictive variants
//!   PrOMP / rPrOMP that fuse a prior through the signal-to-prediction-error
//!   ratio and linear MMSE re-estimation.
//! * [`tracking`] chains predictive pursuit through a Kalman-style
//!   predict/update recursion (DIP / rDIP) and provides a genie-aided Kalman
//!   filter that knows the true supports.
//! * [`experiment`] runs seeded Monte Carlo sweeps and writes SRER tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod linalg;
pub mod model;
pub mod pursuit;
pub mod rng;
pub mod tracking;

pub use error::{Error, Result};
pub use model::{ModelParams, ProcessRealization, SensingMatrix, TransitionMap, TransitionMatrix};
pub use pursuit::{Prior, RecoveryResult};
pub use tracking::{FilterState, PredictionState, PredictorMatrix, Variant};
