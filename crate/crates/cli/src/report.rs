//! Report emission: a header line echoing the experiment, then one record
//! per result, as JSON lines or CSV.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything that determines a run. Worker count is deliberately absent:
/// it does not change results.
#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub seed: u64,
    pub trials: Option<u64>,
    pub format: Format,
    pub output: Option<String>,
    pub version: &'static str,
}

pub struct Report {
    pub header: Header,
    pub records: Vec<Value>,
}

impl Report {
    pub fn new(header: Header) -> Self {
        Self { header, records: Vec::new() }
    }

    /// Adds a record tagged with `kind`; fields of `body` are merged in.
    pub fn push(&mut self, kind: &str, body: impl Serialize, extra: &[(&str, Value)]) {
        let mut record = Map::new();
        record.insert("record".into(), Value::from(kind));
        match serde_json::to_value(body).expect("report bodies serialize") {
            Value::Object(fields) => record.extend(fields),
            other => {
                record.insert("value".into(), other);
            }
        }
        for (k, v) in extra {
            record.insert((*k).into(), v.clone());
        }
        self.records.push(Value::Object(record));
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = serde_json::json!({ "record": "header", "experiment": self.header });
        match self.header.format {
            Format::Json => {
                writeln!(w, "{header}")?;
                for r in &self.records {
                    writeln!(w, "{r}")?;
                }
            }
            Format::Csv => {
                writeln!(w, "# {header}")?;
                write_csv(&mut w, &self.records)?;
            }
        }
        w.flush()
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One row per record; `record` first, then the union of flattened keys in
/// order of first appearance. Arrays are written as JSON text.
fn write_csv<W: Write>(w: &mut W, records: &[Value]) -> std::io::Result<()> {
    let rows: Vec<Vec<(String, Value)>> = records
        .iter()
        .map(|r| {
            let mut out = Vec::new();
            flatten("", r, &mut out);
            out
        })
        .collect();
    let mut columns: Vec<String> = vec!["record".into()];
    for row in &rows {
        for (k, _) in row {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&columns)?;
    for row in &rows {
        out.write_record(
            columns.iter().map(|c| row.iter().find(|(k, _)| k == c).map_or_else(String::new, |(_, v)| cell(v))),
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let header = Header {
            command: "x".into(),
            parameters: Map::new(),
            seed: 1,
            trials: None,
            format: Format::Csv,
            output: None,
            version: "0",
        };
        let mut r = Report::new(header);
        r.push("a", serde_json::json!({"v": 1.5, "nested": {"k": "p,q"}}), &[]);
        r.push("b", serde_json::json!({"w": [1, 2]}), &[("exact", Value::Bool(true))]);
        r
    }

    #[test]
    fn csv_unions_columns_and_quotes() {
        let mut buf = Vec::new();
        sample().write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# {"));
        assert_eq!(lines[1], "record,nested.k,v,exact,w");
        assert_eq!(lines[2], "a,\"p,q\",1.5,,");
        assert_eq!(lines[3], "b,,,true,\"[1,2]\"");
    }

    #[test]
    fn json_lines_start_with_header() {
        let mut r = sample();
        r.header.format = Format::Json;
        let mut buf = Vec::new();
        r.write(&mut buf).unwrap();
        let first: Value = serde_json::from_str(String::from_utf8(buf).unwrap().lines().next().unwrap()).unwrap();
        assert_eq!(first["record"], "header");
        assert_eq!(first["experiment"]["seed"], 1);
    }
}
