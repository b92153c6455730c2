//! Tables, number formatting and the files a run leaves behind.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::Result;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // collapse −0
        return "0.0000000000000000e0".into();
    }
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Real(v) => fmt_f64(*v),
            Self::Text(s) => s.clone(),
            Self::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Self::Int(v) => json!(v),
            // stored as the same decimal text as the CSV so JSON is exact too
            Self::Real(v) => fmt_f64(*v).parse::<f64>().map(|x| json!(x)).unwrap_or(Value::Null),
            Self::Text(s) => json!(s),
            Self::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Self::Real(v)
        } else {
            Self::Missing
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Self::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.into())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Self::Missing, Cell::from)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Real values of a column, `NaN` where missing.
    pub fn reals(&self, name: &str) -> Vec<f64> {
        let Some(k) = self.column(name) else { return Vec::new() };
        self.rows
            .iter()
            .map(|r| match &r[k] {
                Cell::Real(v) => *v,
                Cell::Int(v) => *v as f64,
                _ => f64::NAN,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                Value::Object(m)
            })
            .collect();
        Value::Array(rows)
    }
}

/// Everything a run produces.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    /// Verbatim text files such as schedules.
    pub files: Vec<(String, String)>,
    pub summary: Map<String, Value>,
    /// Set when the run completed but a solver or certificate failed.
    pub failure: Option<String>,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.into(), v.into());
    }

    pub fn write(&self, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            match cfg.format {
                OutputFormat::Csv => fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?,
                OutputFormat::Json => fs::write(dir.join(format!("{}.json", t.name)), pretty(&t.to_json()))?,
            }
        }
        for (name, text) in &self.files {
            fs::write(dir.join(name), text)?;
        }
        let mut summary = self.summary.clone();
        summary.insert("status".into(), json!(if self.failure.is_some() { "failed" } else { "ok" }));
        if let Some(f) = &self.failure {
            summary.insert("failure".into(), json!(f));
        }
        fs::write(dir.join("summary.json"), pretty(&Value::Object(summary)))?;
        fs::write(dir.join("manifest.json"), pretty(&manifest(cfg, self)))?;
        Ok(())
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Resolved config, crate versions and the list of emitted files.
pub fn manifest(cfg: &ExperimentConfig, out: &RunOutput) -> Value {
    let ext = match cfg.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let mut files: Vec<String> = out.tables.iter().map(|t| format!("{}.{ext}", t.name)).collect();
    files.extend(out.files.iter().map(|(n, _)| n.clone()));
    files.push("summary.json".into());
    json!({
        "experiment": cfg.experiment.name(),
        "config": serde_json::to_value(cfg).expect("config serializes"),
        "versions": {
            "photonsim-cli": env!("CARGO_PKG_VERSION"),
            "photonsim-core": photonsim_core::VERSION,
            "photonsim-dynamics": photonsim_dynamics::VERSION,
            "photonsim-subtraction": photonsim_subtraction::VERSION,
            "photonsim-schedule": photonsim_schedule::VERSION,
        },
        "files": files,
    })
}
