//! Matrices as CSV: one header row of column names, then one row per
//! observation. Values are written with 17 significant digits, which
//! round-trips every finite `f64` exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use sparsepca::Matrix;

use crate::error::{io_err, HarnessError, Result};

pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    read_matrix_csv(file, path)
}

/// Parses CSV matrix data from any reader; `origin` is only used in errors.
pub fn read_matrix_csv(reader: impl Read, origin: &Path) -> Result<Matrix> {
    let parse_err = |row: usize, column: usize, message: String| HarnessError::Parse {
        path: origin.to_path_buf(),
        row,
        column,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let width = rdr.headers().map_err(|e| parse_err(1, 0, e.to_string()))?.len();
    if width == 0 {
        return Err(parse_err(1, 0, "missing header row".into()));
    }

    let mut values = Vec::new();
    let mut rows = 0;
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| parse_err(line, 0, e.to_string()))?;
        if record.len() != width {
            return Err(parse_err(
                line,
                0,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(line, j + 1, format!("not a number: '{cell}'")))?;
            if !v.is_finite() {
                return Err(parse_err(line, j + 1, format!("non-finite value '{cell}'")));
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(parse_err(2, 0, "no data rows".into()));
    }
    Ok(Matrix::from_row_slice(rows, width, &values))
}

/// Writes `x` with header `v1,...,vM`.
pub fn save_matrix_csv(x: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(io_err(path))?;
    let names: Vec<String> = (1..=x.ncols()).map(|j| format!("v{j}")).collect();
    write_matrix_csv(x, &names, &mut file)?;
    file.flush().map_err(io_err(path))
}

pub fn write_matrix_csv(x: &Matrix, names: &[String], out: impl Write) -> Result<()> {
    if names.len() != x.ncols() {
        return Err(HarnessError::InvalidInput(format!(
            "{} column names for {} columns",
            names.len(),
            x.ncols()
        )));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(names)?;
    for row in x.row_iter() {
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
    }
    w.flush().map_err(io_err("<csv>"))?;
    Ok(())
}
