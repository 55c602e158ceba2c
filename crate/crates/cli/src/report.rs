//! Report tables rendered as CSV or JSON.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};

use crate::args::Format;

pub const SCHEMA_VERSION: u32 = 1;

/// One experiment's output: parameters, per-row data, summary and warnings.
pub struct Report {
    pub command: &'static str,
    pub params: Vec<(&'static str, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Vec<(&'static str, Value)>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Report {
            command,
            params: Vec::new(),
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &'static str, value: impl Into<Value>) {
        self.params.push((key, value.into()));
    }

    pub fn summary(&mut self, key: &'static str, value: impl Into<Value>) {
        self.summary.push((key, value.into()));
    }

    pub fn row(&mut self, values: Vec<Value>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    fn to_json(&self) -> Result<String> {
        let object = |pairs: &[(&'static str, Value)]| {
            Value::Object(
                pairs
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.clone()))
                    .collect::<Map<_, _>>(),
            )
        };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.clone()))
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "params": object(&self.params),
            "rows": rows,
            "summary": object(&self.summary),
            "warnings": self.warnings,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        Ok(text)
    }

    fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("# schema_version: {SCHEMA_VERSION}\n"));
        out.push_str(&format!("# command: {}\n", self.command));
        for (k, v) in &self.params {
            out.push_str(&format!("# param {k}: {}\n", cell(v)));
        }
        for w in &self.warnings {
            out.push_str(&format!("# warning: {w}\n"));
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("# summary {k}: {}\n", cell(v)));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns)?;
        for r in &self.rows {
            writer.write_record(r.iter().map(cell))?;
        }
        out.push_str(std::str::from_utf8(&writer.into_inner()?)?);
        Ok(out)
    }

    /// Writes to `out`, or to stdout when absent.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                Ok(stdout.flush()?)
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
