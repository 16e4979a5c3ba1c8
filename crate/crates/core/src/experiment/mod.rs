//! Monte Carlo harness: configuration, seeded sweeps, SRER aggregation and
//! CSV output.

mod bundle;
mod config;
mod metrics;
mod runner;
mod table;

pub use bundle::{read_bundle, write_bundle, BUNDLE_FILES};
pub use config::{Algorithm, ExperimentConfig, GridPoint, LambdaKind, OUTPUT_DIR_ENV};
pub use metrics::{db_to_linear, linear_to_db, sigma_n2_from_smnr, srer, SrerAccumulator, SRER_CAP_DB};
pub use runner::{realization_for, run_experiment, run_single};
pub use table::{ResultRecord, ResultTable, CSV_HEADER};
