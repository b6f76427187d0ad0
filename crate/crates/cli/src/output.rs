use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Format;

pub const SCHEMA: u32 = 1;

/// A command's result: a JSON record and optionally a table for CSV output.
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
    /// Exit with status 1 (labeled analytic failure).
    pub failure: bool,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    /// `value` must serialize to a JSON object; `"schema": 1` is put first.
    pub fn new(value: impl Serialize) -> Result<Self> {
        let mut map = Map::new();
        map.insert("schema".into(), Value::from(SCHEMA));
        match serde_json::to_value(value)? {
            Value::Object(fields) => map.extend(fields),
            other => {
                map.insert("value".into(), other);
            }
        }
        Ok(Self { json: Value::Object(map), table: None, failure: false })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn failed(mut self, failure: bool) -> Self {
        self.failure = failure;
        self
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.json)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                match &self.table {
                    Some(t) => {
                        w.write_record(&t.header)?;
                        for row in &t.rows {
                            w.write_record(row)?;
                        }
                    }
                    None => {
                        let fields = self.json.as_object().cloned().unwrap_or_default();
                        w.write_record(fields.keys())?;
                        w.write_record(fields.values().map(cell))?;
                    }
                }
                Ok(w.into_inner().context("flushing CSV")?)
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let bytes = self.render(format)?;
        match out {
            Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(&bytes)?;
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
