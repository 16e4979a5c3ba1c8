use thiserror::Error;

/// Errors raised by the model, pursuit, tracking and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid prior at coordinate {index}: prediction variance {variance} must be positive")]
    InvalidPrior { index: usize, variance: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("config error: {0}")]
    Config(String),

    /// A Monte Carlo run failed; carries enough to replay it.
    #[error("run {run} (master seed {seed}, grid point {point}) failed: {source}")]
    Run {
        seed: u64,
        run: u64,
        point: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by bad user input rather than numerical breakdown.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::InvalidParameter(_) | Error::InvalidDimension(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
