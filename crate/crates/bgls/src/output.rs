//! Result tables and their CSV / JSON renderings.
//!
//! CSV artifacts open with comment lines
//!
//! ```text
//! # quantity=fundfn, grid_kind=log10, tolerance=1e-10, version=0.1.0
//! # config: command=fundfn; interval=2,4; ...
//! # summary: ...
//! ```
//!
//! followed by a header row and one row per grid point. Floats are written
//! in shortest round-trip form.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::Format;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest round-trip decimal; scientific outside `[1e-4, 1e15)`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 || (v.abs() >= 1e-4 && v.abs() < 1e15) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) => f.write_str(&fmt_f64(*v)),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(fmt_f64(*v)),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug)]
pub enum OutputError {
    EmptyGrid,
    LengthMismatch { grid: usize, results: usize },
    RowWidth { row: usize, expected: usize, found: usize },
    Io(std::io::Error),
}

impl fmt::Display for OutputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputError::EmptyGrid => f.write_str("empty grid"),
            OutputError::LengthMismatch { grid, results } => {
                write!(f, "grid has {grid} points but there are {results} results")
            }
            OutputError::RowWidth { row, expected, found } => {
                write!(f, "row {row} has {found} cells, expected {expected}")
            }
            OutputError::Io(e) => write!(f, "write failed: {e}"),
        }
    }
}

impl std::error::Error for OutputError {}

impl From<std::io::Error> for OutputError {
    fn from(e: std::io::Error) -> Self {
        OutputError::Io(e)
    }
}

impl From<csv::Error> for OutputError {
    fn from(e: csv::Error) -> Self {
        OutputError::Io(e.into())
    }
}

/// A result table with its provenance header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub quantity: String,
    pub grid_kind: String,
    pub tolerance: f64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Scalar results.
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(quantity: &str, grid_kind: &str, tolerance: f64, columns: &[&str]) -> Self {
        Table {
            quantity: quantity.into(),
            grid_kind: grid_kind.into(),
            tolerance,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, v: impl Into<Cell>) {
        self.summary.push((key.into(), v.into()));
    }

    fn check(&self) -> Result<(), OutputError> {
        for (i, r) in self.rows.iter().enumerate() {
            if r.len() != self.columns.len() {
                return Err(OutputError::RowWidth { row: i, expected: self.columns.len(), found: r.len() });
            }
        }
        Ok(())
    }

    fn header_line(&self) -> String {
        format!(
            "# quantity={}, grid_kind={}, tolerance={}, version={}",
            self.quantity,
            self.grid_kind,
            fmt_f64(self.tolerance),
            VERSION
        )
    }

    pub fn to_csv(&self, config: &[(String, String)]) -> Result<String, OutputError> {
        self.check()?;
        let mut out = String::new();
        out.push_str(&self.header_line());
        out.push('\n');
        let cfg: Vec<String> = config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("# config: {}\n", cfg.join("; ")));
        if !self.summary.is_empty() {
            let s: Vec<String> = self.summary.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("# summary: {}\n", s.join("; ")));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|c| c.to_string()))?;
        }
        let body = w.into_inner().map_err(|e| OutputError::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn to_json(&self, config: &[(String, String)]) -> Result<String, OutputError> {
        self.check()?;
        let cfg: Map<String, Value> = config.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::to_json).collect())).collect();
        let doc = json!({
            "quantity": self.quantity,
            "grid_kind": self.grid_kind,
            "tolerance": self.tolerance,
            "version": VERSION,
            "config": cfg,
            "summary": summary,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values are serialisable");
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format, config: &[(String, String)]) -> Result<String, OutputError> {
        match format {
            Format::Csv => self.to_csv(config),
            Format::Json => self.to_json(config),
        }
    }
}

/// A two-column sweep table `(grid_column, quantity)`.
pub fn sweep_table(quantity: &str, grid_kind: &str, grid_column: &str, grid: &[f64], results: &[f64], tolerance: f64) -> Result<Table, OutputError> {
    if grid.is_empty() {
        return Err(OutputError::EmptyGrid);
    }
    if grid.len() != results.len() {
        return Err(OutputError::LengthMismatch { grid: grid.len(), results: results.len() });
    }
    let mut t = Table::new(quantity, grid_kind, tolerance, &[grid_column, quantity]);
    for (&g, &r) in grid.iter().zip(results) {
        t.push(vec![Cell::Num(g), Cell::Num(r)]);
    }
    Ok(t)
}

/// Where rendered output goes.
#[derive(Debug, Clone)]
pub struct Sink<'a> {
    pub path: Option<&'a Path>,
    pub format: Format,
}

pub fn write_text(sink: &Sink<'_>, text: &str) -> Result<(), OutputError> {
    match sink.path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Write a sweep of `quantity` over `grid` to `sink`.
pub fn emit_sweep(
    quantity: &str,
    grid_kind: &str,
    grid: &[f64],
    results: &[f64],
    tolerance: f64,
    config: &[(String, String)],
    sink: &Sink<'_>,
) -> Result<(), OutputError> {
    let t = sweep_table(quantity, grid_kind, "x", grid, results, tolerance)?;
    write_text(sink, &t.render(sink.format, config)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let t = sweep_table("phi", "log10", "delta", &[1e-6, 1.0, 1e6], &[0.1, 1.0, 1000.0 / 3.0], 1e-10).unwrap();
        let cfg = vec![("command".to_string(), "fundfn".to_string())];
        let s = t.to_csv(&cfg).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], format!("# quantity=phi, grid_kind=log10, tolerance=1e-10, version={VERSION}"));
        assert_eq!(lines[1], "# config: command=fundfn");
        assert_eq!(lines[2], "delta,phi");
        assert_eq!(lines[3], "1e-6,0.1");
        assert_eq!(lines[5].split(',').nth(1).unwrap().parse::<f64>().unwrap(), 1000.0 / 3.0);
    }

    #[test]
    fn sweep_errors() {
        assert!(matches!(sweep_table("q", "log10", "x", &[], &[], 0.1), Err(OutputError::EmptyGrid)));
        assert!(matches!(sweep_table("q", "log10", "x", &[1.0], &[1.0, 2.0], 0.1), Err(OutputError::LengthMismatch { .. })));
    }

    #[test]
    fn json_keeps_non_finite_values() {
        let mut t = Table::new("r", "levels", 1e-9, &["n", "ratio"]);
        t.push(vec![Cell::Num(10.0), Cell::Num(f64::INFINITY)]);
        t.note("flag", "unbounded");
        let v: Value = serde_json::from_str(&t.to_json(&[]).unwrap()).unwrap();
        assert_eq!(v["rows"][0][1], json!("inf"));
        assert_eq!(v["summary"]["flag"], json!("unbounded"));
        t.push(vec![Cell::Num(1.0)]);
        assert!(t.to_json(&[]).is_err());
    }
}
