//! Functions given as `x,value` samples in a CSV file.

use std::path::Path;

use pqbs_core::{FunctionHandle, Interval, PiecewiseLinear};

use crate::error::CliError;

/// Reads two-column `x,value` data. A first row that does not parse as
/// numbers is taken as a header.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e.into()))?;
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::io(format!("reading {}", path.display()), e.into()))?;
        if record.len() != 2 {
            return Err(CliError::Invalid(format!(
                "{}: line {} has {} fields, expected x,value",
                path.display(),
                i + 1,
                record.len()
            )));
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(x), Ok(v)) => points.push((x, v)),
            _ if i == 0 => continue,
            _ => {
                return Err(CliError::Invalid(format!(
                    "{}: line {} is not numeric: {:?}",
                    path.display(),
                    i + 1,
                    record
                )))
            }
        }
    }
    Ok(points)
}

/// Loads `PATH` as a piecewise-linear function named `file:PATH` on
/// `[0, ell + 1]`, held constant beyond the sampled range.
pub fn load_sampled(path: &Path, ell: usize) -> Result<FunctionHandle, CliError> {
    let data = PiecewiseLinear::new(read_samples(path)?)?;
    Ok(FunctionHandle::sampled(format!("file:{}", path.display()), data, Interval::schurer(ell)))
}

/// Resolves a registry name or `file:PATH`.
pub fn resolve_function(name: &str, ell: usize) -> Result<FunctionHandle, CliError> {
    match name.strip_prefix("file:") {
        Some(path) => load_sampled(Path::new(path), ell),
        None => Ok(FunctionHandle::registry(name, ell)?),
    }
}
