//! CSV and JSON interchange.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! value parses back to the identical `f64`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{domain, Result};
use crate::experiment::{ExperimentResult, RunConfig};
use crate::samplers::{PointSet, Provenance};

/// Writes `dim0,...,dim{d-1}` followed by one row per point.
pub fn write_points_csv<W: Write>(writer: W, points: &PointSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record((0..points.dim()).map(|j| format!("dim{j}")))?;
    for p in points.points() {
        w.write_record(p.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_points_csv<R: Read>(reader: R) -> Result<PointSet> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    let d = headers.len();
    for (j, h) in headers.iter().enumerate() {
        if h.trim() != format!("dim{j}") {
            return domain(format!("unexpected CSV header {h:?} in column {j}, expected dim{j}"));
        }
    }
    let mut coords = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        for field in record.iter() {
            let x: f64 = field
                .trim()
                .parse()
                .map_err(|_| crate::Error::Domain(format!("row {}: cannot parse {field:?}", i + 1)))?;
            coords.push(x);
        }
    }
    PointSet::from_flat(d, coords, Provenance::External)
}

pub fn read_points_file(path: impl AsRef<Path>) -> Result<PointSet> {
    read_points_csv(std::fs::File::open(path)?)
}

pub fn read_config_file(path: impl AsRef<Path>) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_reader(std::fs::File::open(path)?)?;
    config.validate()?;
    Ok(config)
}

/// Writes `replication,sampler,discrepancy`, grouped by sampler slot.
///
/// When both slots run the same sampler the label carries the slot,
/// e.g. `simple.1`.
pub fn write_samples_csv<W: Write>(writer: W, result: &ExperimentResult) -> Result<()> {
    let duplicate = result.runs.len() == 2 && result.runs[0].sampler == result.runs[1].sampler;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["replication", "sampler", "discrepancy"])?;
    for run in &result.runs {
        let label = if duplicate {
            format!("{}.{}", run.sampler.name(), run.slot)
        } else {
            run.sampler.name().to_string()
        };
        for (k, v) in run.samples.iter().enumerate() {
            w.write_record([k.to_string(), label.clone(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
