//! Rendering of results as JSON or CSV.
//!
//! Both formats carry the same header and the same numbers: JSON floats and
//! CSV cells are both written as shortest round-trip decimals.

use serde::Serialize;
use serde_json::{Map, Value};
use unitrace::io::csv_field;

use crate::{Command, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
pub struct Header<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a Command,
    pub format: Format,
    pub seed: u64,
}

impl<'a> Header<'a> {
    pub fn new(config: &'a Command, format: Format, seed: u64) -> Self {
        Header {
            tool: "unitrace",
            version: env!("CARGO_PKG_VERSION"),
            config,
            format,
            seed,
        }
    }
}

/// A command's result: a JSON object, optionally naming one of its array
/// fields as the table to print in CSV form.
pub struct Rendered {
    pub result: Value,
    /// Array field printed as the CSV table, with its columns.
    pub table: Option<(String, Vec<String>)>,
    /// False when the command found a failing check.
    pub pass: bool,
}

impl Rendered {
    pub fn new(result: impl Serialize) -> Result<Self, Failure> {
        Ok(Rendered {
            result: to_value(result)?,
            table: None,
            pass: true,
        })
    }

    pub fn table(mut self, key: &str, columns: &[&str]) -> Self {
        self.table = Some((key.to_string(), columns.iter().map(|c| c.to_string()).collect()));
        self
    }

    pub fn pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}

pub fn to_value(v: impl Serialize) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Io(format!("serialization: {e}")))
}

pub fn render(header: &Header, result: &Value, table: Option<&(String, Vec<String>)>, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => {
            let doc = serde_json::json!({ "header": to_value(header)?, "result": result });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => Ok(render_csv(&to_value(header)?, result, table)),
    }
}

/// A scalar cell: numbers and booleans as in JSON, strings unquoted unless
/// CSV needs quoting, nested values as compact JSON.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => csv_field(s),
        Value::Number(_) | Value::Bool(_) => v.to_string(),
        _ => csv_field(&v.to_string()),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        _ => out.push((prefix.to_string(), cell(v))),
    }
}

fn render_csv(header: &Value, result: &Value, table: Option<&(String, Vec<String>)>) -> String {
    let mut s = String::new();
    let mut meta = Vec::new();
    flatten("header", header, &mut meta);
    let rows = match (table, result) {
        (Some((key, columns)), Value::Object(m)) => {
            let mut rest = Map::new();
            for (k, v) in m {
                if k != key {
                    rest.insert(k.clone(), v.clone());
                }
            }
            flatten("result", &Value::Object(rest), &mut meta);
            m.get(key).and_then(|v| v.as_array()).map(|rows| (rows.clone(), columns))
        }
        _ => None,
    };
    for (k, v) in &meta {
        s.push_str(&format!("# {k}: {v}\n"));
    }
    match rows {
        Some((rows, columns)) => {
            s.push_str(&columns.join(","));
            s.push('\n');
            for r in &rows {
                let cells: Vec<String> = columns.iter().map(|c| r.get(c).map(cell).unwrap_or_default()).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
        }
        None => {
            let mut body = Vec::new();
            flatten("", result, &mut body);
            s.push_str("key,value\n");
            for (k, v) in body {
                s.push_str(&format!("{},{v}\n", csv_field(&k)));
            }
        }
    }
    s
}
