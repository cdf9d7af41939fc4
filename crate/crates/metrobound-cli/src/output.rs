//! Tables, records and their JSON/CSV renderings.

use clap::ValueEnum;
use serde::Deserialize;
use serde_json::{Map, Value};
use std::fmt::Write as _;

/// Significant digits of every printed number.
pub const SIG_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{v:.*e}", SIG_DIGITS - 1).parse().unwrap_or(v)
}

/// JSON number with 12 significant digits; null for NaN and infinities.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(round_sig(v)).map_or(Value::Null, Value::Number)
}

pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        num(v).to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => num(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Clone, Debug)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
    pub doc: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str, doc: &'static str) -> Column {
    Column { name, unit, doc }
}

/// One panel of data: a header documenting each column and the rows.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub title: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, title: impl Into<String>, columns: Vec<Column>) -> Self {
        Table { name: name.into(), title: title.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}: {}", self.name, self.title);
        for c in &self.columns {
            let unit = if c.unit.is_empty() { "-" } else { c.unit };
            let _ = writeln!(s, "# {} [{}]: {}", c.name, unit, c.doc);
        }
        let names: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
        let _ = writeln!(s, "{}", names.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|c| serde_json::json!({"name": c.name, "unit": c.unit, "doc": c.doc}))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.name.into(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        serde_json::json!({"name": self.name, "title": self.title, "columns": columns, "rows": rows})
    }
}

/// Named scalar results of a single evaluation.
#[derive(Clone, Debug, Default)]
pub struct Record {
    fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn num(mut self, key: &str, v: f64) -> Self {
        self.fields.push((key.into(), num(v)));
        self
    }

    pub fn value(mut self, key: &str, v: Value) -> Self {
        self.fields.push((key.into(), v));
        self
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.fields.iter().cloned().collect())
    }

    /// One header line and one data line; arrays are spread over indexed columns.
    pub fn to_csv(&self) -> String {
        let mut names = Vec::new();
        let mut cells = Vec::new();
        for (k, v) in &self.fields {
            flatten(k, v, &mut names, &mut cells);
        }
        format!("# columns: {}\n{}\n{}\n", names.join(", "), names.join(","), cells.join(","))
    }
}

fn flatten(key: &str, v: &Value, names: &mut Vec<String>, cells: &mut Vec<String>) {
    match v {
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{key}_{i}"), item, names, cells);
            }
        }
        Value::Object(m) => {
            for (k, item) in m {
                flatten(&format!("{key}_{k}"), item, names, cells);
            }
        }
        Value::Null => {
            names.push(key.into());
            cells.push("nan".into());
        }
        Value::String(s) => {
            names.push(key.into());
            cells.push(s.clone());
        }
        other => {
            names.push(key.into());
            cells.push(other.to_string());
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
