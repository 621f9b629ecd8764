//! Plain-text matrix format: a header line `n m` followed by `n` lines of `m`
//! whitespace-separated decimal literals.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header `n m`".into(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::Parse {
            line: header_line,
            message: format!("header must be `n m`, got {header:?}"),
        });
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::Parse {
            line: header_line,
            message: format!("invalid dimension {s:?}"),
        })
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;

    let mut data = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        let (line_no, line) = lines.next().ok_or(Error::Parse {
            line: header_line + row + 1,
            message: format!("expected {rows} rows, found {row}"),
        })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != cols {
            return Err(Error::Parse {
                line: line_no,
                message: format!("row {} has {} entries, expected {cols}", row + 1, fields.len()),
            });
        }
        for (col, field) in fields.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("row {}, col {}: cannot parse {field:?}", row + 1, col + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("row {}, col {}: non-finite value", row + 1, col + 1),
                });
            }
            data.push(value);
        }
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::Parse {
            line: line_no,
            message: format!("trailing content after {rows} rows"),
        });
    }
    Ok(Matrix::from_row_slice(rows, cols, &data))
}

pub fn format_matrix(a: &Matrix) -> String {
    let mut out = format!("{} {}\n", a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| format!("{}", a[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parses a comma- or whitespace-separated list of numbers.
pub fn parse_vector(text: &str) -> Result<Vector> {
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(Error::Parse {
                line: 1,
                message: format!("entry {}: cannot parse {s:?}", i + 1),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Vector::from_vec(values))
}
