use std::fmt::Write as _;
use std::path::Path;

use super::config::{Algorithm, GridPoint};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "algorithm,smnr_db,kappa,nu,srer_db,capped,runs,seed";

/// Pooled SRER of one algorithm at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub algorithm: Algorithm,
    pub smnr_db: f64,
    pub kappa: f64,
    pub nu: f64,
    pub srer_db: f64,
    pub capped: bool,
    pub runs: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub records: Vec<ResultRecord>,
}

impl ResultTable {
    /// Lookup by algorithm and grid point (exact coordinates).
    pub fn get(&self, algorithm: Algorithm, point: &GridPoint) -> Option<&ResultRecord> {
        self.records.iter().find(|r| {
            r.algorithm == algorithm && r.smnr_db == point.smnr_db && r.kappa == point.kappa && r.nu == point.nu
        })
    }

    pub fn srer_db(&self, algorithm: Algorithm, point: &GridPoint) -> Option<f64> {
        self.get(algorithm, point).map(|r| r.srer_db)
    }

    /// CSV with LF line endings and six decimals on every real column.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{:.6},{},{},{}",
                r.algorithm,
                r.smnr_db,
                r.kappa,
                r.nu,
                r.srer_db,
                u8::from(r.capped),
                r.runs,
                r.seed
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, self.to_csv())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(CSV_HEADER) {
            return Err(Error::Config("result CSV has an unexpected header".into()));
        }
        let bad = |line: &str| Error::Config(format!("malformed result row `{line}`"));
        let records = lines
            .map(|line| {
                let f: Vec<&str> = line.split(',').collect();
                if f.len() != 8 {
                    return Err(bad(line));
                }
                let num = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
                Ok(ResultRecord {
                    algorithm: f[0].parse()?,
                    smnr_db: num(f[1])?,
                    kappa: num(f[2])?,
                    nu: num(f[3])?,
                    srer_db: num(f[4])?,
                    capped: f[5] == "1",
                    runs: f[6].parse().map_err(|_| bad(line))?,
                    seed: f[7].parse().map_err(|_| bad(line))?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { records })
    }
}
