//! Table rendering with fixed significant-digit formatting.

use serde_json::{Map, Value};
use std::io::Write;
use std::path::Path;

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    /// Written as an empty CSV field / JSON null.
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

/// `x` with `digits` significant digits in scientific notation.
pub fn format_number(x: f64, digits: usize) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        // `+ 0.0` folds −0 into 0.
        format!("{:.*e}", digits.saturating_sub(1), x + 0.0)
    }
}

/// Round through the textual form so CSV and JSON carry the same digits.
fn json_number(x: f64, digits: usize) -> Value {
    format_number(x, digits)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Run summary: a `# {json}` trailer in CSV, a `summary` key in JSON.
    pub summary: Option<Value>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, digits: usize) -> String {
        match format {
            Format::Csv => self.to_csv(digits),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(digits)).expect("json");
                s.push('\n');
                s
            }
        }
    }

    fn to_csv(&self, digits: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_number(*x, digits),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Missing => String::new(),
                })
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        if let Some(summary) = &self.summary {
            out.push_str("# ");
            out.push_str(&round_json(summary, digits).to_string());
            out.push('\n');
        }
        out
    }

    fn to_json(&self, digits: usize) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| {
                        let v = match c {
                            Cell::Num(x) => json_number(*x, digits),
                            Cell::Bool(b) => Value::Bool(*b),
                            Cell::Missing => Value::Null,
                        };
                        (k.clone(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("columns".into(), self.columns.clone().into());
        top.insert("rows".into(), Value::Array(rows));
        if let Some(summary) = &self.summary {
            top.insert("summary".into(), round_json(summary, digits));
        }
        Value::Object(top)
    }
}

/// Apply the significant-digit rounding to every float in a JSON value.
pub fn round_json(v: &Value, digits: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json_number(n.as_f64().unwrap(), digits),
        Value::Array(a) => Value::Array(a.iter().map(|x| round_json(x, digits)).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(k, x)| (k.clone(), round_json(x, digits))).collect()),
        other => other.clone(),
    }
}

/// Write to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io {
            path: p.display().to_string(),
            source: e,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_number(0.123456789123, 9), "1.23456789e-1");
        assert_eq!(format_number(-2.0, 9), "-2.00000000e0");
        assert_eq!(format_number(0.0, 3), "0.00e0");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![1.0.into(), true.into(), Cell::Missing]);
        t.summary = Some(json!({"best": 0.333333333333}));
        assert_eq!(
            t.render(Format::Csv, 3),
            "a,b,c\n1.00e0,true,\n# {\"best\":0.333}\n"
        );
    }

    #[test]
    fn json_rows_use_nulls_for_missing() {
        let mut t = Table::new(&["x", "n"]);
        t.push(vec![2.0.into(), None.into()]);
        let v: Value = serde_json::from_str(&t.render(Format::Json, 9)).unwrap();
        assert_eq!(v["rows"][0]["x"], json!(2.0));
        assert_eq!(v["rows"][0]["n"], Value::Null);
    }
}
