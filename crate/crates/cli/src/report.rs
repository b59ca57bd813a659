//! Report emission: one versioned JSON document, a flattened CSV table of
//! the rows, or plain text. Keys are sorted so output is byte-identical for
//! a fixed configuration.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "hecke-lab/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub rows: Vec<Value>,
    pub summary: Map<String, Value>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, config: Value) -> Report {
        Report { command: command.into(), config, rows: Vec::new(), summary: Map::new(), pass: true }
    }

    pub fn push(&mut self, row: Value, ok: bool) {
        self.pass &= ok;
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.to_string(), v.into());
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "pass": self.pass,
            "summary": self.summary,
            "rows": self.rows,
        })
    }

    pub fn render(&self, format: Format) -> Result<String, csv::Error> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.to_csv(),
            Format::Text => Ok(self.to_text()),
        }
    }

    fn to_csv(&self) -> Result<String, csv::Error> {
        let flat: Vec<Map<String, Value>> = self.rows.iter().map(flatten).collect();
        let mut header: Vec<String> = flat.iter().flat_map(|m| m.keys().cloned()).collect();
        header.sort();
        header.dedup();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header)?;
        for row in &flat {
            w.write_record(header.iter().map(|k| row.get(k).map(scalar).unwrap_or_default()))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 strings"))
    }

    fn to_text(&self) -> String {
        let mut s = format!("{}: {}\n", self.command, if self.pass { "pass" } else { "FAIL" });
        for (k, v) in &self.summary {
            let _ = writeln!(s, "  {k} = {}", scalar(v));
        }
        for row in &self.rows {
            let line = flatten(row).iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect::<Vec<_>>().join(" ");
            let _ = writeln!(s, "{line}");
        }
        s
    }
}

/// Nested objects become dotted keys; arrays stay whole.
fn flatten(v: &Value) -> Map<String, Value> {
    fn go(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    go(&key, x, out);
                }
            }
            other => {
                out.insert(prefix.to_string(), other.clone());
            }
        }
    }
    let mut out = Map::new();
    go("", v, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(scalar).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

pub fn write_out(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}
