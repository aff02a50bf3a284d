//! Result tables and their CSV/JSON serialization.

use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{to_args, ExperimentConfig, Format, OUTPUT_DIR_ENV};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Str(String),
    Int(u64),
    Float(f64),
    Bool(bool),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// A table with a fixed column schema plus command-specific metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Map<String, Value>,
}

impl Report {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Report {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: vec![],
            metadata: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<(), CliError> {
        assert_eq!(row.len(), self.columns.len(), "row width");
        if let Some(i) = row.iter().position(|c| matches!(c, Cell::Float(v) if !v.is_finite())) {
            return Err(CliError::NonFinite(self.columns[i].clone()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell of row `row` in column `name`.
    pub fn get(&self, row: usize, name: &str) -> Option<&Cell> {
        self.column(name).and_then(|i| self.rows.get(row).map(|r| &r[i]))
    }

    pub fn float(&self, row: usize, name: &str) -> Option<f64> {
        match self.get(row, name)? {
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn header(&self, config: &ExperimentConfig) -> Result<Map<String, Value>, CliError> {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut meta = Map::new();
        meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        meta.insert("timestamp".into(), json!(timestamp));
        meta.insert("config".into(), serde_json::to_value(config)?);
        meta.insert("args".into(), json!(to_args(config).join(" ")));
        meta.extend(self.metadata.clone());
        Ok(meta)
    }

    /// CSV with `#` comment lines carrying the metadata.
    pub fn write_csv<W: Write>(&self, config: &ExperimentConfig, mut out: W) -> Result<(), CliError> {
        for (key, value) in self.header(config)? {
            writeln!(out, "# {key}: {value}")?;
        }
        self.write_csv_rows(out)
    }

    /// The data part only; identical runs give identical bytes here.
    pub fn write_csv_rows<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, config: &ExperimentConfig) -> Result<Value, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(r.iter().map(|c| serde_json::to_value(c).unwrap()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Ok(json!({
            "config": config,
            "metadata": self.header(config)?,
            "columns": self.columns,
            "rows": rows,
        }))
    }

    pub fn write_json<W: Write>(&self, config: &ExperimentConfig, mut out: W) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut out, &self.to_json(config)?)?;
        writeln!(out)?;
        Ok(())
    }
}

/// Where output goes: the explicit path (relative paths resolve under
/// `PQEC_OUTPUT_DIR` when it is set), `$PQEC_OUTPUT_DIR/<command>.<ext>`,
/// or stdout.
pub fn output_path(config: &ExperimentConfig) -> Option<PathBuf> {
    let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    match (&config.output, dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => {
            Some(dir.join(format!("{}.{}", config.command.name(), config.format.extension())))
        }
        (None, None) => None,
    }
}

pub fn write_report(config: &ExperimentConfig, report: &Report) -> Result<(), CliError> {
    let write = |out: &mut dyn Write| match config.format {
        Format::Csv => report.write_csv(config, out),
        Format::Json => report.write_json(config, out),
    };
    match output_path(config) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => write(&mut std::io::stdout().lock()),
    }
}
