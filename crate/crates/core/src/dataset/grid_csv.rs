use std::path::Path;

use nalgebra::DMatrix;

use super::ScalarGrid;
use crate::error::{Error, Result};

fn is_blank(token: &str) -> bool {
    let t = token.trim();
    t.is_empty() || t.eq_ignore_ascii_case("nan")
}

/// Reads a rectangular CSV of numbers. Empty fields and `NaN` (any case) mark
/// blank cells, which are excluded from the mask. The first row is the top
/// of the grid.
pub fn load_scalar_csv(path: impl AsRef<Path>) -> Result<ScalarGrid> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut width = None;
    let mut values = Vec::new();
    let mut mask = Vec::new();
    let mut height = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                row,
                expected,
                found: record.len(),
            });
        }
        for (col, token) in record.iter().enumerate() {
            if is_blank(token) {
                values.push(f64::NAN);
                mask.push(false);
            } else {
                let v: f64 = token.parse().map_err(|_| Error::InvalidNumber {
                    path: path.to_path_buf(),
                    row,
                    col,
                    token: token.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(Error::InvalidNumber {
                        path: path.to_path_buf(),
                        row,
                        col,
                        token: token.to_string(),
                    });
                }
                values.push(v);
                mask.push(true);
            }
        }
        height += 1;
    }
    let width = width.ok_or_else(|| Error::InvalidArgument(format!("{path:?} is empty")))?;
    ScalarGrid::new(
        DMatrix::from_row_slice(height, width, &values),
        DMatrix::from_row_slice(height, width, &mask),
    )
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("{path:?}: {other:?}")),
    }
}

/// Writes a grid in the format read by [`load_scalar_csv`]; blank cells are
/// empty fields. Values use Rust's shortest round-trip formatting.
pub fn write_scalar_csv(grid: &ScalarGrid, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for r in 0..grid.height() {
        for c in 0..grid.width() {
            if c > 0 {
                out.push(',');
            }
            if grid.is_valid(r, c) {
                out.push_str(&grid.value(r, c).to_string());
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
