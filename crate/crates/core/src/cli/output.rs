//! Tables and their CSV/JSON rendering.
//!
//! Floats are written with the shortest representation that round-trips,
//! so identical inputs give byte-identical output.

use serde::Serialize;
use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    /// Not applicable for this row: empty in CSV, `null` in JSON.
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

fn float_text(v: f64) -> Result<String> {
    // adding zero maps -0.0 to 0.0
    Number::from_f64(v + 0.0)
        .map(|n| n.to_string())
        .ok_or_else(|| Error::Capability(format!("non-finite value {v} in output")))
}

impl Cell {
    fn csv(&self) -> Result<String> {
        Ok(match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => float_text(*v)?,
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        })
    }

    fn json(&self) -> Result<Value> {
        Ok(match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => {
                Value::Number(Number::from_f64(*v + 0.0).ok_or_else(|| Error::Capability(format!("non-finite value {v} in output")))?)
            }
            Cell::Text(t) => json!(t),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        })
    }
}

/// Named columns, rows of cells, and an optional list of summary values
/// (printed to the error channel in CSV mode).
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Self::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, name: &str, value: impl Into<Cell>) {
        self.summary.push((name.to_string(), value.into()));
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields = row.iter().map(Cell::csv).collect::<Result<Vec<_>>>()?;
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn summary_lines(&self) -> Result<String> {
        let mut out = String::new();
        for (name, value) in &self.summary {
            out.push_str(&format!("{name}: {}\n", value.csv()?));
        }
        Ok(out)
    }

    /// `{"config": ..., "data": {"columns", "rows", "summary"?}}`.
    pub fn to_json(&self, config: &impl Serialize) -> Result<String> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::json).collect::<Result<Vec<_>>>().map(Value::Array))
            .collect::<Result<Vec<_>>>()?;
        let mut data = Map::new();
        data.insert("columns".into(), json!(self.columns));
        data.insert("rows".into(), Value::Array(rows));
        if !self.summary.is_empty() {
            let mut summary = Map::new();
            for (name, value) in &self.summary {
                summary.insert(name.clone(), value.json()?);
            }
            data.insert("summary".into(), Value::Object(summary));
        }
        let config = serde_json::to_value(config).map_err(|e| Error::Capability(e.to_string()))?;
        let doc = json!({ "config": config, "data": Value::Object(data) });
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Capability(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["n", "value", "note"]);
        t.push(vec![0usize.into(), 3.85.into(), "a,b".into()]);
        t.push(vec![1usize.into(), 1e-300.into(), Cell::Empty]);
        assert_eq!(t.to_csv().unwrap(), "n,value,note\n0,3.85,\"a,b\"\n1,1e-300,\n");
    }

    #[test]
    fn json_layout_and_nan_rejection() {
        let mut t = Table::new(&["x"]);
        t.push(vec![0.1.into()]);
        t.summarize("max", 2.0);
        let text = t.to_json(&json!({"s": 1.0})).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["data"]["rows"][0][0], json!(0.1));
        assert_eq!(v["data"]["summary"]["max"], json!(2.0));
        assert_eq!(v["config"]["s"], json!(1.0));
        let mut bad = Table::new(&["x"]);
        bad.push(vec![f64::NAN.into()]);
        assert!(bad.to_json(&json!({})).is_err());
        assert!(bad.to_csv().is_err());
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 16.81, -2.5e-17, 6.02214076e23] {
            let text = float_text(v).unwrap();
            assert_eq!(text.parse::<f64>().unwrap(), v);
        }
    }
}
