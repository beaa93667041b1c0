//! Tables with the resolved config embedded, as CSV or JSON.

use crate::CliError;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

/// Shortest round-trip decimal; infinities as `inf`.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:?}")
    }
}

pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        Value::Null
    } else {
        Value::String(fmt_f64(x))
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => (*b as u8).to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json_f64(*x),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(t) => json!(t),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, config: &BTreeMap<String, String>) -> String {
        let mut out = config_comment(config);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let m: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }

    pub fn render(&self, format: Format, config: &BTreeMap<String, String>) -> String {
        match format {
            Format::Csv => self.to_csv(config),
            Format::Json => json_document(config, vec![("rows", self.to_json_value())]),
        }
    }
}

/// `# key=value` lines in key order.
pub fn config_comment(config: &BTreeMap<String, String>) -> String {
    config.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

/// `{"config": {...}, <fields>}`, pretty printed with a trailing newline.
pub fn json_document(config: &BTreeMap<String, String>, fields: Vec<(&str, Value)>) -> String {
    let mut m = Map::new();
    m.insert("config".into(), json!(config));
    for (k, v) in fields {
        m.insert(k.into(), v);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json value serializes");
    s.push('\n');
    s
}

/// Write to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(json_f64(f64::INFINITY), json!("inf"));
    }

    #[test]
    fn csv_has_config_header() {
        let mut cfg = BTreeMap::new();
        cfg.insert("r".to_string(), "1".to_string());
        let mut t = Table::new(vec!["x", "y"]);
        t.push(vec![1.5.into(), Cell::Empty]);
        assert_eq!(t.to_csv(&cfg), "# r=1\nx,y\n1.5,\n");
        let j: Value = serde_json::from_str(&t.render(Format::Json, &cfg)).unwrap();
        assert_eq!(j["config"]["r"], "1");
        assert_eq!(j["rows"][0]["y"], Value::Null);
    }
}
