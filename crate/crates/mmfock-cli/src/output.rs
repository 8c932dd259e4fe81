// Copyright 2026 The mmfock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Tabular results with a provenance header, rendered as CSV or JSON.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Format;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// Twelve significant digits, locale independent.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0".
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    /// Scalar facts printed in the header.
    pub notes: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra JSON payload, such as a reusable effective state.
    pub payload: Option<(String, Value)>,
}

impl Report {
    pub fn new(command: &str, config: Value, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            config,
            notes: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            payload: None,
        }
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.notes.push((key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null)));
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Value of a named column in a given row.
    pub fn cell(&self, row: usize, column: &str) -> Option<&Cell> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.get(row)?.get(c)
    }

    pub fn float(&self, row: usize, column: &str) -> Option<f64> {
        match self.cell(row, column)? {
            Cell::Float(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# mmfock {VERSION}\n"));
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# config: {}\n", self.config));
        for (k, v) in &self.notes {
            out.push_str(&format!("# {k}: {}\n", note_text(v)));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> String {
        let mut notes = Map::new();
        for (k, v) in &self.notes {
            notes.insert(k.clone(), v.clone());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.clone(), serde_json::to_value(v).unwrap_or(Value::Null));
                }
                Value::Object(m)
            })
            .collect();
        let mut doc = json!({
            "mmfock_version": VERSION,
            "command": self.command,
            "config": self.config,
            "notes": notes,
            "columns": self.columns,
            "rows": rows,
        });
        if let Some((k, v)) = &self.payload {
            doc[k] = v.clone();
        }
        let mut s = serde_json::to_string_pretty(&doc).unwrap_or_default();
        s.push('\n');
        s
    }
}

fn note_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), |x| if n.is_f64() { fmt_float(x) } else { n.to_string() }),
        other => other.to_string(),
    }
}
