//! Comma-separated numeric data. An optional header row is detected by a
//! non-numeric first line; rows with a blank field are dropped.

use std::path::Path;

use super::dataset::{RegressionDataset, Standardizer};
use crate::error::{Error, Result};

pub fn load_csv(
    path: impl AsRef<Path>,
    target_column: usize,
    standardize_inputs: bool,
) -> Result<RegressionDataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let mut width = None;
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    let mut first = true;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let is_first = std::mem::take(&mut first);
        let w = *width.get_or_insert(record.len());
        if target_column >= w {
            return Err(Error::IndexOutOfRange {
                index: target_column,
                len: w,
            });
        }
        if record.iter().any(str::is_empty) {
            continue;
        }
        values.clear();
        let mut bad = None;
        for field in record.iter() {
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    bad = Some(field.to_string());
                    break;
                }
            }
        }
        if let Some(field) = bad {
            if is_first {
                continue; // header
            }
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("not a number: {field:?}"),
            });
        }
        for (j, v) in values.iter().enumerate() {
            if j == target_column {
                targets.push(*v);
            } else {
                inputs.push(*v);
            }
        }
    }
    let w = width.unwrap_or(0);
    if targets.is_empty() || w < 2 {
        return Err(Error::EmptyData {
            path: path.to_path_buf(),
        });
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    let mut ds = RegressionDataset::new(name, w - 1, inputs, targets)?;
    if standardize_inputs {
        Standardizer::fit(&ds).apply(&mut ds);
    }
    Ok(ds)
}

/// Writes inputs `x1..xd` followed by the target column `t`, with a header.
pub fn write_csv(data: &RegressionDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=data.dim()).map(|j| format!("x{j}")).collect();
    header.push("t".into());
    w.write_record(&header)?;
    for (row, t) in data.rows().zip(data.targets()) {
        w.write_record(row.iter().chain(std::iter::once(t)).map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
