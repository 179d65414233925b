//! Matrix file format: comma-separated values, one matrix row per line,
//! no header unless requested. Floats are written with full round-trip
//! precision, so parse-then-serialize is lossless.
//!
//! Missingness comes in through either a companion 0/1 mask file congruent
//! in shape with the data, or a missing token (default "NA") inline in the
//! data file.

use std::fs;
use std::io::Write;
use std::path::Path;

use covest_core::{DataMatrix, MaskedData, SymMatrix};

use crate::error::CliError;

/// A parsed rectangular table with its observation mask (all-true unless a
/// missing token was active).
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl ParsedTable {
    pub fn into_masked_data(self) -> Result<MaskedData, CliError> {
        let y = DataMatrix::new(self.rows, self.cols, self.values)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        MaskedData::new(y, self.mask).map_err(|e| CliError::Internal(e.to_string()))
    }
}

fn parse_error(path: &Path, line: usize, column: usize, message: String) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        line,
        column,
        message,
    }
}

/// Splits into logical CSV lines (1-based numbering preserved), tolerating
/// CRLF and a trailing newline.
fn logical_lines(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        out.push((idx + 1, line));
    }
    while matches!(out.last(), Some((_, l)) if l.trim().is_empty()) {
        out.pop();
    }
    out
}

/// Parses a numeric table. With `missing_token` set, fields equal to the
/// token (after trimming) become unobserved zero entries. Non-finite
/// numbers, ragged rows, and unparsable fields are reported with their
/// line and 1-based field index.
pub fn parse_table(
    path: &Path,
    text: &str,
    has_header: bool,
    missing_token: Option<&str>,
) -> Result<ParsedTable, CliError> {
    let mut lines = logical_lines(text);
    if has_header && !lines.is_empty() {
        lines.remove(0);
    }
    if lines.is_empty() {
        return Err(parse_error(path, 1, 1, "file contains no data rows".into()));
    }

    let mut cols = 0usize;
    let mut values = Vec::new();
    let mut mask = Vec::new();
    for (row_idx, (line_no, line)) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            return Err(parse_error(
                path,
                *line_no,
                1,
                "empty row inside the table".into(),
            ));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if row_idx == 0 {
            cols = fields.len();
        } else if fields.len() != cols {
            return Err(parse_error(
                path,
                *line_no,
                fields.len().min(cols) + 1,
                format!("expected {cols} fields, found {}", fields.len()),
            ));
        }
        for (field_idx, field) in fields.iter().enumerate() {
            let trimmed = field.trim();
            if let Some(token) = missing_token {
                if trimmed == token {
                    values.push(0.0);
                    mask.push(false);
                    continue;
                }
            }
            let value: f64 = trimmed.parse().map_err(|_| {
                parse_error(
                    path,
                    *line_no,
                    field_idx + 1,
                    format!("cannot parse '{trimmed}' as a number"),
                )
            })?;
            if !value.is_finite() {
                return Err(parse_error(
                    path,
                    *line_no,
                    field_idx + 1,
                    format!("non-finite value '{trimmed}'"),
                ));
            }
            values.push(value);
            mask.push(true);
        }
    }
    Ok(ParsedTable {
        rows: lines.len(),
        cols,
        values,
        mask,
    })
}

/// Parses a companion mask file of strict 0/1 fields.
pub fn parse_mask(path: &Path, text: &str, has_header: bool) -> Result<ParsedTable, CliError> {
    let mut lines = logical_lines(text);
    if has_header && !lines.is_empty() {
        lines.remove(0);
    }
    if lines.is_empty() {
        return Err(parse_error(path, 1, 1, "file contains no data rows".into()));
    }
    let mut cols = 0usize;
    let mut mask = Vec::new();
    for (row_idx, (line_no, line)) in lines.iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if row_idx == 0 {
            cols = fields.len();
        } else if fields.len() != cols {
            return Err(parse_error(
                path,
                *line_no,
                fields.len().min(cols) + 1,
                format!("expected {cols} fields, found {}", fields.len()),
            ));
        }
        for (field_idx, field) in fields.iter().enumerate() {
            match field.trim() {
                "0" => mask.push(false),
                "1" => mask.push(true),
                other => {
                    return Err(parse_error(
                        path,
                        *line_no,
                        field_idx + 1,
                        format!("mask entries must be 0 or 1, found '{other}'"),
                    ))
                }
            }
        }
    }
    let rows = lines.len();
    Ok(ParsedTable {
        rows,
        cols,
        values: vec![0.0; rows * cols],
        mask,
    })
}

fn push_row(out: &mut String, row: impl Iterator<Item = f64>) {
    let mut first = true;
    for v in row {
        if !first {
            out.push(',');
        }
        out.push_str(&format!("{v}"));
        first = false;
    }
    out.push('\n');
}

fn header_line(cols: usize) -> String {
    let names: Vec<String> = (1..=cols).map(|j| format!("c{j}")).collect();
    format!("{}\n", names.join(","))
}

/// Serializes a symmetric matrix; floats use shortest round-trip notation.
pub fn serialize_sym_matrix(m: &SymMatrix, with_header: bool) -> String {
    let mut out = String::new();
    if with_header {
        out.push_str(&header_line(m.dim()));
    }
    for i in 0..m.dim() {
        push_row(&mut out, m.row(i).iter().copied());
    }
    out
}

/// Writes a file atomically: the content lands under a temporary name in
/// the same directory and is renamed into place, so a failed run never
/// leaves a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::Internal(format!("{}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(bytes).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)
}

/// Reads a whole input file, mapping failures to exit-code-2 errors.
pub fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::UnreadableInput {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
