//! Plain-text dump of one realization, for inspection.
//!
//! A bundle is a directory of long-format CSV files, 0-based indices, values
//! printed in shortest round-trip form:
//!
//! * `states.csv`       `t,index,value` for every active coefficient
//! * `supports.csv`     `t,index`
//! * `transitions.csv`  `t,source,destination` (moves from `t` to `t+1`)
//! * `measurements.csv` `t,row,value`
//! * `sensing.csv`      `row,col,value`

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{ProcessRealization, SensingMatrix, TransitionMap};

pub const BUNDLE_FILES: [&str; 5] =
    ["states.csv", "supports.csv", "transitions.csv", "measurements.csv", "sensing.csv"];

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

pub fn write_bundle(dir: &Path, r: &ProcessRealization) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let mut states = String::from("t,index,value\n");
    let mut supports = String::from("t,index\n");
    for (t, (x, support)) in r.states.iter().zip(&r.supports).enumerate() {
        for &i in support {
            let _ = writeln!(states, "{t},{i},{}", x[i]);
            let _ = writeln!(supports, "{t},{i}");
        }
    }
    let mut transitions = String::from("t,source,destination\n");
    for (t, map) in r.maps.iter().enumerate() {
        for &(j, i) in &map.pairs {
            let _ = writeln!(transitions, "{t},{j},{i}");
        }
    }
    let mut measurements = String::from("t,row,value\n");
    for (t, y) in r.measurements.iter().enumerate() {
        for (row, v) in y.iter().enumerate() {
            let _ = writeln!(measurements, "{t},{row},{v}");
        }
    }
    let mut sensing = String::from("row,col,value\n");
    for col in 0..r.h.ncols() {
        for row in 0..r.h.nrows() {
            let _ = writeln!(sensing, "{row},{col},{}", r.h[(row, col)]);
        }
    }
    for (name, body) in BUNDLE_FILES.iter().zip([states, supports, transitions, measurements, sensing]) {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

fn rows(dir: &Path, name: &str, width: usize) -> Result<Vec<Vec<String>>> {
    let path = dir.join(name);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<String> = line.split(',').map(str::to_owned).collect();
            if f.len() == width {
                Ok(f)
            } else {
                Err(Error::Config(format!("{}: malformed row `{line}`", path.display())))
            }
        })
        .collect()
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Config(format!("bundle: cannot parse `{s}`")))
}

/// Inverse of [`write_bundle`].
pub fn read_bundle(dir: &Path) -> Result<ProcessRealization> {
    let sensing = rows(dir, "sensing.csv", 3)?;
    let m = sensing.iter().map(|f| num::<usize>(&f[0])).try_fold(0, |a, v| v.map(|v| a.max(v + 1)))?;
    let n = sensing.iter().map(|f| num::<usize>(&f[1])).try_fold(0, |a, v| v.map(|v| a.max(v + 1)))?;
    let mut h = DMatrix::zeros(m, n);
    for f in &sensing {
        h[(num(&f[0])?, num(&f[1])?)] = num(&f[2])?;
    }

    let meas = rows(dir, "measurements.csv", 3)?;
    let t_len = meas.iter().map(|f| num::<usize>(&f[0])).try_fold(0, |a, v| v.map(|v| a.max(v + 1)))?;
    let mut measurements = vec![DVector::zeros(m); t_len];
    for f in &meas {
        measurements[num::<usize>(&f[0])?][num::<usize>(&f[1])?] = num(&f[2])?;
    }

    let mut states = vec![DVector::zeros(n); t_len];
    for f in rows(dir, "states.csv", 3)? {
        states[num::<usize>(&f[0])?][num::<usize>(&f[1])?] = num(&f[2])?;
    }
    let mut supports = vec![Vec::new(); t_len];
    for f in rows(dir, "supports.csv", 2)? {
        supports[num::<usize>(&f[0])?].push(num(&f[1])?);
    }
    let mut maps = vec![TransitionMap::default(); t_len.saturating_sub(1)];
    for f in rows(dir, "transitions.csv", 3)? {
        maps[num::<usize>(&f[0])?].pairs.push((num(&f[1])?, num(&f[2])?));
    }
    Ok(ProcessRealization { h: SensingMatrix::from_raw(h), states, supports, maps, measurements })
}
