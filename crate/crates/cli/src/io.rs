use std::fs;
use std::path::Path;

use polynet::{KnotGrid, TargetSamples};

use crate::CliError;

/// Knot values are accepted if their x column is within this distance of
/// `j / N`.
const KNOT_TOLERANCE: f64 = 1e-12;

fn read_records(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let width = reader
        .headers()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
        .len();
    if width < 2 {
        return Err(CliError::Io(format!(
            "{}: expected a header with x and at least one value column",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .map(|field| field.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::Io(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Io(format!(
                "{}: row {}: non-finite value",
                path.display(),
                i + 1
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Reads `x,f1,...,fq` rows at the knots `x_j = j/N`. `n` defaults to the
/// row count minus one.
pub fn read_knot_samples(path: &Path, n: Option<usize>) -> Result<TargetSamples, CliError> {
    let rows = read_records(path)?;
    if rows.len() < 2 {
        return Err(CliError::Usage(format!(
            "{}: need at least two knot rows",
            path.display()
        )));
    }
    let n = n.unwrap_or(rows.len() - 1);
    let grid = KnotGrid::new(n).map_err(CliError::from)?;
    if rows.len() != grid.knot_count() {
        return Err(CliError::Usage(format!(
            "{}: {} rows, but N = {n} needs {}",
            path.display(),
            rows.len(),
            grid.knot_count()
        )));
    }
    for (j, row) in rows.iter().enumerate() {
        let expected = grid.knot(j as i64);
        if (row[0] - expected).abs() > KNOT_TOLERANCE {
            return Err(CliError::Usage(format!(
                "{}: row {} has x = {}, expected knot {expected}",
                path.display(),
                j + 1,
                row[0]
            )));
        }
    }
    let values = rows.into_iter().map(|row| row[1..].to_vec()).collect();
    TargetSamples::new(grid, values).map_err(CliError::from)
}

/// Reads dense `x,y` samples for kernel fitting.
pub fn read_dense_samples(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let rows = read_records(path)?;
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| match row.as_slice() {
            [x, y] => Ok((*x, *y)),
            _ => Err(CliError::Io(format!(
                "{}: row {} must have exactly two columns",
                path.display(),
                i + 1
            ))),
        })
        .collect()
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
