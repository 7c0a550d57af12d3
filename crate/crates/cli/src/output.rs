//! Table rendering. Floats use 17 significant digits in scientific notation
//! so that output is byte-identical across runs and locales.

use serde_json::value::RawValue;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(usize),
    Float(f64),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Self::Int(i) => i.to_string(),
            // Adding 0.0 turns -0.0 into 0.0.
            Self::Float(x) if x.is_finite() => format!("{:.16e}", x + 0.0),
            Self::Float(x) if x.is_nan() => "nan".into(),
            Self::Float(x) => if x > 0.0 { "inf" } else { "-inf" }.into(),
        }
    }

    fn json(self) -> Box<RawValue> {
        let text = match self {
            Self::Float(x) if !x.is_finite() => "null".into(),
            other => other.render(),
        };
        RawValue::from_string(text).expect("numeric literal is valid JSON")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|c| c.render()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, meta: Value) -> String {
        let rows: Vec<Map<String, Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(name, cell)| {
                        let raw = serde_json::to_value(cell.json()).expect("raw number");
                        (name.clone(), raw)
                    })
                    .collect()
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), meta);
        doc.insert("rows".into(), Value::Array(rows.into_iter().map(Value::Object).collect()));
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
        text.push('\n');
        text
    }
}
