//! CSV export and import for ray and Gram matrices.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::{GramMatrix, Normalization, RaySet};
use crate::error::{Error, Result};

/// One ray per row, preceded by a header `x0,x1,...`. Values use the shortest
/// representation that round-trips exactly.
pub fn write_rays_csv(rs: &RaySet) -> String {
    matrix_csv(rs.matrix(), "x")
}

pub fn write_gram_csv(b: &GramMatrix) -> String {
    matrix_csv(b.entries(), "c")
}

fn matrix_csv(m: &DMatrix<f64>, prefix: &str) -> String {
    let mut out = (0..m.ncols())
        .map(|j| format!("{prefix}{j}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{}", m[(i, j)]).expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

/// Reads a square Gram matrix written by [`write_gram_csv`]; a header row of
/// non-numeric labels is skipped.
pub fn read_gram_csv(text: &str, mode: Normalization) -> Result<GramMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if rows.is_empty() => {}
            Err(_) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "non-numeric matrix entry".into(),
                })
            }
        }
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("Gram CSV must hold a nonempty square matrix".into()));
    }
    GramMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]), mode)
}
