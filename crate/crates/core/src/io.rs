//! Text formats for matrices, factorizations, grid functions and probe tables.
//!
//! Matrix files are JSON objects `{"d": 1, "rows": [[0, 1], [-1, 0]], "label": "J"}`
//! holding a `2d × 2d` matrix. Grid functions are
//! `{"d": 1, "n": 64, "extent": 4.0, "values": [re0, im0, re1, im1, ...]}` in
//! row-major order, axis 0 slowest.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::numeric::{Grid, GridFunction};
use crate::probes::{DensityRow, ProbeReport};
use crate::symplectic::{DjFactorization, SymplecticMatrix};

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    d: usize,
    rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

/// A matrix read from a file, not yet checked for symplecticity.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub d: usize,
    pub entries: Mat,
    pub label: Option<String>,
}

impl MatrixFile {
    pub fn symplectic(&self, tol: f64) -> Result<SymplecticMatrix> {
        SymplecticMatrix::with_tol(self.entries.clone(), tol)
    }
}

pub fn rows_of(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn parse_matrix(text: &str) -> Result<MatrixFile> {
    let raw: RawMatrix = serde_json::from_str(text).map_err(json_error)?;
    if raw.d == 0 {
        return Err(Error::Parse("field d: must be positive".into()));
    }
    let n = 2 * raw.d;
    if raw.rows.len() != n {
        return Err(Error::Parse(format!("field rows: expected {n} rows for d = {}, got {}", raw.d, raw.rows.len())));
    }
    for (i, row) in raw.rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!("field rows[{i}]: expected {n} entries, got {}", row.len())));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("field rows[{i}][{j}]: not a finite number")));
        }
    }
    let entries = Mat::from_fn(n, n, |i, j| raw.rows[i][j]);
    Ok(MatrixFile { d: raw.d, entries, label: raw.label })
}

pub fn format_matrix(m: &Mat, label: Option<&str>) -> Result<String> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
        return Err(Error::Dimension(format!("expected a 2d x 2d matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let raw = RawMatrix { d: m.nrows() / 2, rows: rows_of(m), label: label.map(String::from) };
    serde_json::to_string_pretty(&raw).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub q: Vec<Vec<f64>>,
    pub l: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    /// One-based members of `J`.
    pub j: Vec<usize>,
    pub residual: f64,
    pub symmetry_defect: f64,
}

impl FactorizationReport {
    pub fn new(f: &DjFactorization, label: Option<&str>) -> Self {
        FactorizationReport {
            d: f.dim(),
            label: label.map(String::from),
            q: rows_of(&f.q),
            l: rows_of(&f.l),
            p: rows_of(&f.p),
            j: f.j.one_based(),
            residual: f.residual,
            symmetry_defect: f.symmetry_defect,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    d: usize,
    n: usize,
    extent: f64,
    values: Vec<f64>,
}

pub fn parse_grid_function(text: &str) -> Result<GridFunction> {
    let raw: RawGrid = serde_json::from_str(text).map_err(json_error)?;
    let grid = Grid::new(raw.d, raw.n, raw.extent).map_err(|e| Error::Parse(format!("header: {e}")))?;
    if raw.values.len() != 2 * grid.len() {
        return Err(Error::Parse(format!(
            "field values: expected {} numbers (interleaved re/im), got {}",
            2 * grid.len(),
            raw.values.len()
        )));
    }
    if let Some(k) = raw.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Parse(format!("field values[{k}]: not a finite number")));
    }
    let values = raw.values.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    GridFunction::new(grid, values)
}

pub fn format_grid_function(f: &GridFunction) -> String {
    let g = f.grid();
    let raw = RawGrid {
        d: g.dim(),
        n: g.n(),
        extent: g.extent(),
        values: f.values().iter().flat_map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string(&raw).expect("plain data serializes")
}

/// One line per grid point: the coordinates followed by `|F|`.
pub fn modulus_csv(f: &GridFunction) -> String {
    let g = f.grid();
    let mut out = String::new();
    let header: Vec<String> = (1..=g.dim()).map(|k| format!("z{k}")).collect();
    let _ = writeln!(out, "{},abs", header.join(","));
    for (k, v) in f.values().iter().enumerate() {
        let coords: Vec<String> = g.coords(k).iter().map(|c| format!("{c}")).collect();
        let _ = writeln!(out, "{},{}", coords.join(","), v.norm());
    }
    out
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|r| format!("{r}")).unwrap_or_default()
}

/// CSV table `parameter,label,ratio,reference`.
pub fn probe_table(report: &ProbeReport) -> String {
    let mut out = String::from("parameter,label,ratio,reference\n");
    for row in &report.rows {
        let _ = writeln!(out, "{},{},{},{}", row.parameter, row.label, row.ratio, fmt_opt(report.reference));
    }
    out
}

/// Human-readable summary with aligned columns.
pub fn probe_summary(report: &ProbeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "probe: {}", report.name);
    let _ = writeln!(out, "evaluator: {}", report.evaluator);
    let _ = writeln!(out, "reference: {}", report.reference.map(|r| format!("{r:.6}")).unwrap_or_else(|| "-".into()));
    let _ = writeln!(out, "{:>14}  {:>16}", report.parameter_name, "ratio");
    for row in &report.rows {
        let _ = writeln!(out, "{:>14}  {:>16.9e}", row.label, row.ratio);
    }
    if report.aliasing {
        let _ = writeln!(out, "warning: aliasing detected on the grid");
    }
    let _ = writeln!(out, "verdict: {}", report.verdict);
    out
}

pub fn density_csv(rows: &[DensityRow]) -> String {
    let mut out = String::from("tau,xi_distance,xi_free,a_tau_shift_invertible,residual\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.tau, r.xi_distance, r.xi_free, r.a_tau_shift_invertible, r.residual);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::dj_factorize;

    #[test]
    fn matrix_round_trip() {
        let j = SymplecticMatrix::standard_j(2);
        let text = format_matrix(j.entries(), Some("J")).unwrap();
        let back = parse_matrix(&text).unwrap();
        assert_eq!(back.d, 2);
        assert_eq!(back.label.as_deref(), Some("J"));
        assert_eq!(&back.entries, j.entries());
        assert!(back.symplectic(1e-10).is_ok());
    }

    #[test]
    fn matrix_diagnostics() {
        let e = parse_matrix(r#"{"d": 1, "rows": [[1, 0], [0]]}"#).unwrap_err();
        assert!(e.to_string().contains("rows[1]"), "{e}");
        let e = parse_matrix(r#"{"d": 2, "rows": [[1, 0], [0, 1]]}"#).unwrap_err();
        assert!(e.to_string().contains("expected 4 rows"), "{e}");
        let e = parse_matrix("{\"d\": 1,\n \"rows\": [[1, 0], [0, x]]}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = parse_matrix(r#"{"rows": [[1, 0], [0, 1]]}"#).unwrap_err();
        assert!(e.to_string().contains("d"), "{e}");
        let m = parse_matrix(r#"{"d": 1, "rows": [[1, 1], [0, 2]]}"#).unwrap();
        assert!(m.symplectic(1e-10).is_err());
    }

    #[test]
    fn factorization_report_lists_all_factors() {
        let f = dj_factorize(&SymplecticMatrix::standard_j(1), 1e-9).unwrap();
        let json = FactorizationReport::new(&f, None).to_json();
        for key in ["\"q\"", "\"l\"", "\"p\"", "\"j\"", "\"residual\""] {
            assert!(json.contains(key));
        }
    }

    #[test]
    fn grid_function_round_trip() {
        let grid = Grid::self_dual(1, 8).unwrap();
        let f = GridFunction::from_fn(grid, |x| Complex64::new(x[0], -x[0] * x[0]));
        let text = format_grid_function(&f);
        let back = parse_grid_function(&text).unwrap();
        assert_eq!(back.values(), f.values());
        let bad = r#"{"d": 1, "n": 8, "extent": 2.0, "values": [1, 0]}"#;
        assert!(parse_grid_function(bad).unwrap_err().to_string().contains("values"));
        let bad = r#"{"d": 1, "n": 6, "extent": 2.0, "values": []}"#;
        assert!(parse_grid_function(bad).unwrap_err().to_string().contains("header"));
    }

    #[test]
    fn csv_has_one_line_per_point() {
        let grid = Grid::self_dual(2, 8).unwrap();
        let f = GridFunction::zeros(grid);
        assert_eq!(modulus_csv(&f).lines().count(), 65);
    }
}
