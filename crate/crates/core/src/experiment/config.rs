//! Flat `key = value` experiment configuration.
//!
//! One pair per line, `#` starts a comment, lists are comma separated.
//! Recognised keys (defaults in brackets):
//!
//! | key          | meaning                                              |
//! |--------------|------------------------------------------------------|
//! | `n`          | state dimension [200]                                |
//! | `k`          | active coefficients per snapshot [10]                |
//! | `k_max`      | support bound given to the algorithms [10]           |
//! | `snapshots`  | snapshots per run [100]                              |
//! | `alpha`      | AR coefficient [-0.8]                                |
//! | `sigma_w2`   | innovation variance, or `auto` for `(1-α²)/K` [auto] |
//! | `lambda`     | `neighbor`, `mixture` or `static` [neighbor]         |
//! | `nu`         | mixture factor(s), list [0]                          |
//! | `smnr_db`    | SMNR grid in dB, list [10]                           |
//! | `kappa`      | measurement fraction M/N grid, list [0.25]           |
//! | `algorithms` | subset of `omp, dip, rdip, genie` [omp, dip]         |
//! | `runs`       | Monte Carlo runs per grid point [20]                 |
//! | `seed`       | 64-bit master seed [1]                               |
//! | `output`     | CSV path [`$DIP_OUTPUT_DIR/results.csv`]             |

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    build_lambda_mixture, build_lambda_neighbor, build_lambda_static, unit_power_sigma_w2, ModelParams,
    TransitionMatrix,
};

use super::metrics::sigma_n2_from_smnr;

/// Directory used for the CSV when no output path is configured.
pub const OUTPUT_DIR_ENV: &str = "DIP_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Omp,
    Dip,
    Rdip,
    Genie,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Omp => "omp",
            Algorithm::Dip => "dip",
            Algorithm::Rdip => "rdip",
            Algorithm::Genie => "genie",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omp" => Ok(Algorithm::Omp),
            "dip" => Ok(Algorithm::Dip),
            "rdip" => Ok(Algorithm::Rdip),
            "genie" => Ok(Algorithm::Genie),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaKind {
    Neighbor,
    Mixture,
    Static,
}

impl FromStr for LambdaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neighbor" => Ok(LambdaKind::Neighbor),
            "mixture" => Ok(LambdaKind::Mixture),
            "static" => Ok(LambdaKind::Static),
            other => Err(Error::Config(format!("unknown lambda kind `{other}`"))),
        }
    }
}

/// One coordinate of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub smnr_db: f64,
    pub kappa: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub k_max: usize,
    pub snapshots: usize,
    pub alpha: f64,
    /// `None` selects the unit-power calibration `(1-α²)/K`.
    pub sigma_w2: Option<f64>,
    pub lambda_kind: LambdaKind,
    pub nu_grid: Vec<f64>,
    pub smnr_db_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub runs: u64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 200,
            k: 10,
            k_max: 10,
            snapshots: 100,
            alpha: -0.8,
            sigma_w2: None,
            lambda_kind: LambdaKind::Neighbor,
            nu_grid: vec![0.0],
            smnr_db_grid: vec![10.0],
            kappa_grid: vec![0.25],
            algorithms: vec![Algorithm::Omp, Algorithm::Dip],
            runs: 20,
            seed: 1,
            output_path: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_num(key, s)).collect()
}

impl ExperimentConfig {
    /// Parse a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip_prefix(e))))?;
        }
        Ok(cfg)
    }

    /// Override a single key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse_num(key, value)?,
            "k" => self.k = parse_num(key, value)?,
            "k_max" => self.k_max = parse_num(key, value)?,
            "snapshots" => self.snapshots = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "sigma_w2" => self.sigma_w2 = if value == "auto" { None } else { Some(parse_num(key, value)?) },
            "lambda" => self.lambda_kind = value.parse()?,
            "nu" => self.nu_grid = parse_list(key, value)?,
            "smnr_db" => self.smnr_db_grid = parse_list(key, value)?,
            "kappa" => self.kappa_grid = parse_list(key, value)?,
            "algorithms" => self.algorithms = parse_list(key, value)?,
            "runs" => self.runs = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "output" => self.output_path = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let grids =
            [("smnr_db", self.smnr_db_grid.len()), ("kappa", self.kappa_grid.len()), ("nu", self.nu_grid.len())];
        if let Some((name, _)) = grids.iter().find(|g| g.1 == 0) {
            return Err(Error::Config(format!("`{name}` grid is empty")));
        }
        let swept: Vec<&str> = grids.iter().filter(|g| g.1 > 1).map(|g| g.0).collect();
        if swept.len() > 1 {
            return Err(Error::Config(format!("only one grid may be swept at a time, got {}", swept.join(" and "))));
        }
        if self.lambda_kind != LambdaKind::Mixture && self.nu_grid.len() > 1 {
            return Err(Error::Config("a `nu` sweep needs `lambda = mixture`".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms selected".into()));
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].contains(a) {
                return Err(Error::Config(format!("algorithm `{a}` listed twice")));
            }
        }
        if self.runs == 0 {
            return Err(Error::Config("`runs` must be at least 1".into()));
        }
        if let Some(nu) = self.nu_grid.iter().find(|nu| !(0.0..=1.0).contains(*nu)) {
            return Err(Error::Config(format!("mixture factor {nu} outside [0, 1]")));
        }
        if let Some(s) = self.smnr_db_grid.iter().find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("SMNR {s} dB is not finite")));
        }
        for point in self.grid() {
            self.params_for(&point).and_then(|p| p.validate()).map_err(|e| Error::Config(strip_prefix(e)))?;
        }
        Ok(())
    }

    /// Grid points in sweep order.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &smnr_db in &self.smnr_db_grid {
            for &kappa in &self.kappa_grid {
                for &nu in &self.nu_grid {
                    out.push(GridPoint { smnr_db, kappa, nu });
                }
            }
        }
        out
    }

    pub fn measurements_for(&self, kappa: f64) -> usize {
        (kappa * self.n as f64).round().max(0.0) as usize
    }

    pub fn params_for(&self, point: &GridPoint) -> Result<ModelParams> {
        let m = self.measurements_for(point.kappa);
        if m == 0 {
            return Err(Error::InvalidDimension(format!("kappa {} gives no measurements", point.kappa)));
        }
        Ok(ModelParams {
            n: self.n,
            m,
            k: self.k,
            k_max: self.k_max,
            snapshots: self.snapshots,
            alpha: self.alpha,
            sigma_w2: self.sigma_w2.unwrap_or_else(|| unit_power_sigma_w2(self.alpha, self.k.max(1))),
            sigma_n2: sigma_n2_from_smnr(m, point.smnr_db),
        })
    }

    pub fn lambda_for(&self, point: &GridPoint) -> Result<TransitionMatrix> {
        match self.lambda_kind {
            LambdaKind::Neighbor => build_lambda_neighbor(self.n),
            LambdaKind::Mixture => build_lambda_mixture(self.n, point.nu),
            LambdaKind::Static => Ok(build_lambda_static(self.n)),
        }
    }

    /// Configured output path, or `results.csv` under `$DIP_OUTPUT_DIR`
    /// (current directory when unset).
    pub fn resolve_output_path(&self) -> PathBuf {
        if let Some(p) = &self.output_path {
            return p.clone();
        }
        let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        dir.join("results.csv")
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(msg) => msg,
        other => other.to_string(),
    }
}
