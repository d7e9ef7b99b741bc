//! Experiment implementations, one module per subcommand.

pub mod decouple;
pub mod entropy_scan;
pub mod k_omega;
pub mod kest_scan;
pub mod reduce_demo;
pub mod selectors_exp;
pub mod verify_all;

use std::path::Path;

use crate::config::RunRecord;
use crate::table::Table;

pub type DynResult<T> = Result<T, Box<dyn std::error::Error>>;

/// Write a table into the run's output directory and log it in the record.
pub fn emit(record: &mut RunRecord, out_dir: &Path, name: &str, table: &Table) -> DynResult<()> {
    table.write(&out_dir.join(name))?;
    record.emitted_files.push(name.to_string());
    Ok(())
}

/// Median of a sample (midpoint convention), NaN on empty input.
pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Deterministic quantile with linear interpolation.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        v[lo]
    } else {
        v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
    }
}
