//! Record tables rendered as JSON or CSV.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Format;

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

pub fn round_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().copied().map(round15).collect()
}

/// Same text as the JSON encoding of the rounded value.
fn number(x: f64) -> String {
    json!(round15(x)).to_string()
}

/// One CSV cell / JSON value.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
    OptNumber(Option<f64>),
    Int(u64),
    Bool(bool),
    /// Written as a JSON array, or `;`-joined in CSV.
    Numbers(Vec<f64>),
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Number(x) => json!(round15(*x)),
            Cell::OptNumber(x) => json!(x.map(round15)),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Numbers(xs) => json!(round_all(xs)),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Number(x) => number(*x),
            Cell::OptNumber(x) => x.map(number).unwrap_or_default(),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Numbers(xs) => xs.iter().map(|&x| number(x)).collect::<Vec<_>>().join(";"),
        }
    }
}

/// Records of one command: a fixed header and one row per record, plus a
/// JSON-only summary object.
#[derive(Clone, Debug)]
pub struct Table {
    pub command: &'static str,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Value,
}

impl Table {
    pub fn new(command: &'static str, headers: &[&'static str]) -> Self {
        Self {
            command,
            headers: headers.to_vec(),
            rows: Vec::new(),
            summary: json!({}),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.headers.len(), "row width");
        self.rows.push(row);
    }

    pub fn with_summary<S: Serialize>(mut self, summary: S) -> Self {
        self.summary = serde_json::to_value(summary).expect("summary serializes");
        self
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.headers
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), c.to_json()))
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "command": self.command,
            "summary": self.summary,
            "records": records,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("json value serializes");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Where results go: an explicit file, `<dir>/<command>.<ext>`, or stdout.
pub fn destination(output: Option<&Path>, out_dir: Option<&Path>, command: &str, format: Format) -> Option<PathBuf> {
    match (output, out_dir) {
        (Some(path), _) => Some(path.to_path_buf()),
        (None, Some(dir)) => Some(dir.join(format!("{command}.{}", format.extension()))),
        (None, None) => None,
    }
}

pub fn emit(text: &str, dest: Option<&Path>) -> Result<()> {
    match dest {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))?;
            }
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            log::info!("wrote {}", path.display());
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
