//! CSV and JSON rendering. Every output embeds the resolved configuration.

use serde_json::{Map, Value};

use crate::config::Format;

/// Result of one subcommand, independent of the output format.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub command: &'static str,
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Scalars reported next to the table.
    pub extra: Map<String, Value>,
    /// Single-record outputs are flattened into one JSON object.
    pub record: bool,
    pub default_format: Format,
    pub summary: String,
}

impl Output {
    pub fn table(command: &'static str, config: Value, columns: &[&str], rows: Vec<Vec<Value>>) -> Self {
        Self {
            command,
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            extra: Map::new(),
            record: false,
            default_format: Format::Csv,
            summary: String::new(),
        }
    }

    pub fn render(&self, format: Option<Format>) -> String {
        match format.unwrap_or(self.default_format) {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut s = format!("# command: {}\n# config: {}\n", self.command, self.config);
        for (k, v) in &self.extra {
            s += &format!("# {k}: {v}\n");
        }
        s += &self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell).collect();
            s += &cells.join(",");
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("command".into(), Value::from(self.command));
        obj.insert("config".into(), self.config.clone());
        let as_obj = |row: &Vec<Value>| -> Map<String, Value> {
            self.columns.iter().cloned().zip(row.iter().cloned()).collect()
        };
        if self.record && self.rows.len() == 1 {
            obj.extend(as_obj(&self.rows[0]));
        } else {
            obj.insert("rows".into(), Value::Array(self.rows.iter().map(|r| Value::Object(as_obj(r))).collect()));
        }
        obj.extend(self.extra.clone());
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("json values serialize");
        s.push('\n');
        s
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `f64` as JSON; non-finite values become strings rather than `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::from(x.to_string()))
}
