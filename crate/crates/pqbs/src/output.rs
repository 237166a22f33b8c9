//! Tabular results and their CSV and JSON encodings.
//!
//! CSV floats use `{:.16e}` (17 significant digits) so the same run always
//! produces the same bytes. JSON floats use the shortest representation that
//! parses back to the same `f64`.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(v) => Value::String(v.clone()),
            Cell::Missing => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// One result table plus the run metadata that goes with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn new(command: &str, columns: &[&'static str]) -> Self {
        Self { command: command.to_string(), columns: columns.to_vec(), rows: Vec::new(), metadata: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.metadata.push((key, value.into()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }

    pub fn write_csv(&self, out: impl Write) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let wrap = |e: csv::Error| CliError::io("writing CSV", e.into());
        w.write_record(&self.columns).map_err(wrap)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(wrap)?;
        }
        w.flush().map_err(|e| CliError::io("writing CSV", e))
    }

    pub fn to_json(&self) -> Value {
        let metadata: Map<String, Value> = self.metadata.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.clone()));
        doc.insert("metadata".into(), Value::Object(metadata));
        doc.insert("columns".into(), Value::Array(self.columns.iter().map(|c| Value::from(*c)).collect()));
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }

    pub fn write_json(&self, mut out: impl Write) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut out, &self.to_json()).map_err(|e| CliError::io("writing JSON", e.into()))?;
        writeln!(out).map_err(|e| CliError::io("writing JSON", e))
    }

    pub fn write(&self, format: Format, out: impl Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &["m", "value", "ok", "note"]);
        t.push(vec![4usize.into(), 0.1f64.into(), true.into(), Cell::Missing]);
        t.push(vec![8usize.into(), (1.0f64 / 3.0).into(), false.into(), "x".into()]);
        t.meta("grid", 21usize);
        t
    }

    #[test]
    fn csv_has_header_and_fixed_digits() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "m,value,ok,note");
        assert_eq!(lines[1], "4,1.0000000000000001e-1,true,");
        assert_eq!(lines[2], "8,3.3333333333333331e-1,false,x");
    }

    #[test]
    fn csv_floats_parse_back_exactly() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 123456.789, -0.0] {
            let text = Cell::Float(v).csv();
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{text}");
        }
    }

    #[test]
    fn json_round_trips() {
        let t = sample();
        let text = serde_json::to_string(&t.to_json()).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["rows"][1][1].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(back["metadata"]["grid"], 21);
        assert_eq!(back["rows"][0][3], Value::Null);
        assert_eq!(Cell::Float(f64::NAN).json(), Value::Null);
    }
}
