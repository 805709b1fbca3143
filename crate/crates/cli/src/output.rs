//! Deterministic CSV and report output.
//!
//! Numeric cells carry 17 significant digits in scientific notation with a
//! `.` decimal separator; rows end with LF. Values that are absent or not
//! finite appear as the literal token `NA`, never as NaN or infinities.

use gbdt_core::matcore::ComplexMatrix;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Formats a finite float with 17 significant digits; `NA` otherwise.
pub fn fmt_number(value: f64) -> String {
    if !value.is_finite() {
        return "NA".to_string();
    }
    // Normalise -0.0 so byte-identical reruns cannot disagree on the sign
    // of a zero.
    let value = if value == 0.0 { 0.0 } else { value };
    format!("{value:.16e}")
}

/// CSV cell from an optional value.
pub fn fmt_cell(value: Option<f64>) -> String {
    value.map_or_else(|| "NA".to_string(), fmt_number)
}

/// A CSV sink with a fixed header.
pub struct CsvWriter {
    path: PathBuf,
    lines: Vec<String>,
    columns: usize,
}

impl CsvWriter {
    pub fn new(path: PathBuf, header: &[&str]) -> Self {
        Self {
            path,
            lines: vec![header.join(",")],
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.columns, "row width mismatch");
        self.lines.push(cells.join(","));
    }

    pub fn finish(self) -> std::io::Result<()> {
        let mut file = fs::File::create(&self.path)?;
        for line in &self.lines {
            file.write_all(line.as_bytes())?;
            file.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// One verification check of a run.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub description: String,
    /// Residual value; absent when not finite or not applicable.
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// A residual-vs-tolerance check.
    pub fn residual(name: &str, description: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            description: description.to_string(),
            residual: residual.is_finite().then_some(residual),
            tolerance: Some(tolerance),
            pass: residual.is_finite() && residual <= tolerance,
        }
    }

    /// A plain boolean check.
    pub fn boolean(name: &str, description: &str, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            description: description.to_string(),
            residual: None,
            tolerance: None,
            pass,
        }
    }
}

/// The verification report appended by every command.
#[derive(Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub command: String,
    pub tolerance_override: Option<f64>,
    pub checks: Vec<Check>,
    /// Command-specific structured extras (sorted keys, deterministic).
    pub extras: serde_json::Map<String, serde_json::Value>,
}

impl Report {
    pub fn new(scenario: &str, command: &str, tolerance_override: Option<f64>) -> Self {
        Self {
            scenario: scenario.to_string(),
            command: command.to_string(),
            tolerance_override,
            checks: Vec::new(),
            extras: serde_json::Map::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extra(&mut self, key: &str, value: serde_json::Value) {
        self.extras.insert(key.to_string(), value);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, out_dir: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("report serialises");
        text.push('\n');
        fs::write(out_dir.join("report.json"), text)
    }
}

/// JSON value from a float, turning non-finite values into `null`.
pub fn json_number(value: f64) -> serde_json::Value {
    serde_json::Number::from_f64(value).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

/// `prefix_ij_re, prefix_ij_im` column names for a rows x cols matrix.
pub fn matrix_headers(prefix: &str, rows: usize, cols: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(format!("{prefix}_{i}{j}_re"));
            out.push(format!("{prefix}_{i}{j}_im"));
        }
    }
    out
}

/// Matching cells for [`matrix_headers`]; `None` renders a full NA block.
pub fn matrix_cells(m: Option<&ComplexMatrix>, rows: usize, cols: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * rows * cols);
    match m {
        Some(m) => {
            for i in 0..rows {
                for j in 0..cols {
                    out.push(fmt_number(m[(i, j)].re));
                    out.push(fmt_number(m[(i, j)].im));
                }
            }
        }
        None => out.resize(2 * rows * cols, "NA".to_string()),
    }
    out
}

/// Nested `{"re": [[..]], "im": [[..]]}` JSON for a matrix.
pub fn matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    let rows = m.rows();
    let cols = m.cols();
    let grab = |f: &dyn Fn(usize, usize) -> f64| -> serde_json::Value {
        serde_json::Value::Array(
            (0..rows)
                .map(|i| {
                    serde_json::Value::Array((0..cols).map(|j| json_number(f(i, j))).collect())
                })
                .collect(),
        )
    };
    let mut map = serde_json::Map::new();
    map.insert("re".to_string(), grab(&|i, j| m[(i, j)].re));
    map.insert("im".to_string(), grab(&|i, j| m[(i, j)].im));
    serde_json::Value::Object(map)
}
