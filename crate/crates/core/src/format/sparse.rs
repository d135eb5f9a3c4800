//! Sparse unitary text format: a header line `sparse-u v1 dim=<N>` followed by
//! `N` lines `<row> <col> <re> <im>` in row order.

use std::io::{self, BufRead, Write};

use num_complex::Complex64;

use super::{parse_f64, FormatError};
use crate::sparse::SparseUnitary;

pub const SPARSE_HEADER: &str = "sparse-u v1";

pub fn serialize_sparse<W: Write>(u: &SparseUnitary, mut sink: W) -> io::Result<()> {
    writeln!(sink, "{SPARSE_HEADER} dim={}", u.dim())?;
    for (row, (&col, val)) in u.cols().iter().zip(u.vals()).enumerate() {
        writeln!(sink, "{row} {col} {} {}", val.re, val.im)?;
    }
    sink.flush()
}

/// Loads a sparse matrix and rejects column maps that are not bijective.
pub fn parse_sparse<R: BufRead>(source: R) -> Result<SparseUnitary, FormatError> {
    let u = parse_sparse_unchecked(source)?;
    if let Some(col) = u.find_repeated_column() {
        return Err(FormatError::Invalid(format!(
            "column map is not a bijection: column {col} appears more than once"
        )));
    }
    Ok(u)
}

/// Loads a sparse matrix checking only its shape, so that a corrupt matrix
/// can still be handed to the verifier.
pub fn parse_sparse_unchecked<R: BufRead>(source: R) -> Result<SparseUnitary, FormatError> {
    let mut lines = source.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| FormatError::Invalid("empty sparse file".into()))?;
    let dim = header
        .strip_prefix(SPARSE_HEADER)
        .and_then(|rest| rest.trim().strip_prefix("dim="))
        .and_then(|d| d.parse::<u64>().ok())
        .ok_or_else(|| FormatError::syntax(1, format!("malformed header {header:?}")))?;
    if dim < 2 || !dim.is_power_of_two() || dim > (1 << crate::MAX_QUBITS) {
        return Err(FormatError::syntax(
            1,
            format!("dimension {dim} is not a power of two"),
        ));
    }

    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let [row, col, re, im] = tokens[..] else {
            return Err(FormatError::syntax(
                line_no,
                "expected `<row> <col> <re> <im>`",
            ));
        };
        let row: u64 = row
            .parse()
            .map_err(|_| FormatError::syntax(line_no, format!("malformed row {row:?}")))?;
        if row != cols.len() as u64 {
            return Err(FormatError::syntax(
                line_no,
                format!("expected row {}, found row {row}", cols.len()),
            ));
        }
        if row >= dim {
            return Err(FormatError::Invalid(format!("more than {dim} rows")));
        }
        let col: u64 = col
            .parse()
            .map_err(|_| FormatError::syntax(line_no, format!("malformed column {col:?}")))?;
        if col >= dim {
            return Err(FormatError::syntax(
                line_no,
                format!("column {col} outside dimension {dim}"),
            ));
        }
        cols.push(col);
        vals.push(Complex64::new(
            parse_f64(re, line_no)?,
            parse_f64(im, line_no)?,
        ));
    }
    if cols.len() as u64 != dim {
        return Err(FormatError::Invalid(format!(
            "row count mismatch: header says {dim}, found {}",
            cols.len()
        )));
    }
    SparseUnitary::new(cols, vals).map_err(|e| FormatError::Invalid(e.to_string()))
}
