//! Report records, the run manifest, and file writers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use szego_core::{CMatrix, C64};

use crate::CliError;

/// A flat numeric table; complex entries occupy `_re`/`_im` column pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &'static str, header: Vec<String>) -> Self {
        Table {
            name,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len(), "{}: row width", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let internal = |e: csv::Error| CliError::Internal(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(internal)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.to_string()))
                .map_err(internal)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }
}

/// Column names `{prefix}{i}{j}_re`, `{prefix}{i}{j}_im` in row-major order.
pub fn matrix_header(prefix: &str, dim: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            out.push(format!("{prefix}{i}{j}_re"));
            out.push(format!("{prefix}{i}{j}_im"));
        }
    }
    out
}

pub fn matrix_cells(m: &CMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}

/// JSON form of a complex matrix: `{"re": rows, "im": rows}`.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixRecord {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for MatrixRecord {
    fn from(m: &CMatrix) -> Self {
        let part = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        MatrixRecord {
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexRecord {
    fn from(z: C64) -> Self {
        ComplexRecord { re: z.re, im: z.im }
    }
}

/// Output of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub summary: Vec<String>,
    pub record: serde_json::Value,
    pub tables: Vec<Table>,
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: serde_json::Value,
    pub spec_sha256: String,
    pub tolerance_overrides: Option<serde_json::Value>,
    /// No command draws random numbers.
    pub seed: Option<u64>,
    pub version: &'static str,
}

impl RunManifest {
    pub fn new(
        command: &crate::Command,
        spec: &crate::MeasureSpec,
        overrides: Option<&str>,
    ) -> Self {
        let canonical = serde_json::to_string(spec).expect("spec serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        RunManifest {
            command: serde_json::to_value(command).expect("command serializes"),
            spec_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            tolerance_overrides: overrides.and_then(|t| serde_json::from_str(t).ok()),
            seed: None,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Writes `<dir>/<name>.json` and one `<dir>/<name>_<table>.csv` per table; returns the paths.
pub fn write_outputs(
    dir: &Path,
    name: &str,
    manifest: &RunManifest,
    report: &Report,
) -> Result<Vec<PathBuf>, CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Internal(format!("{}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();

    let doc = serde_json::json!({ "manifest": manifest, "result": report.record });
    let path = dir.join(format!("{name}.json"));
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| io(&path, e))?;
    written.push(path);

    for t in &report.tables {
        let path = dir.join(format!("{name}_{}.csv", t.name));
        fs::write(&path, t.to_csv()?).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use szego_core::linalg::c64;

    #[test]
    fn matrix_columns_are_row_major_pairs() {
        let m = CMatrix::from_fn(2, 2, |i, j| c64((2 * i + j) as f64, -1.0));
        assert_eq!(
            matrix_header("A", 2)[..4],
            ["A00_re", "A00_im", "A01_re", "A01_im"]
        );
        assert_eq!(
            matrix_cells(&m),
            vec![0.0, -1.0, 1.0, -1.0, 2.0, -1.0, 3.0, -1.0]
        );
    }

    #[test]
    fn csv_uses_round_trip_formatting() {
        let mut t = Table::new("t", vec!["n".into(), "x".into()]);
        t.push(vec![3.0, 0.1 + 0.2]);
        let text = t.to_csv().unwrap();
        assert_eq!(text, "n,x\n3,0.30000000000000004\n");
        let back: f64 = text
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(back, 0.1 + 0.2);
    }
}
