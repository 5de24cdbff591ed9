//! Versioned report envelope and its JSON / CSV renderings.

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const SCHEMA: &str = "orbitope/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Everything needed to rerun an experiment, plus its result. Wall time is kept out so
/// that equal inputs give equal bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub result: Value,
    pub pass: Option<bool>,
}

impl Report {
    pub fn new(command: &str, config: Value, seed: Option<u64>, result: Value, pass: Option<bool>) -> Self {
        Report {
            schema: SCHEMA,
            tool: "orbitope",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            seed,
            result,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        other => other.to_string(),
    }
}

/// One row per array element (a lone object is one row); nested values are written
/// as compact JSON.
pub fn to_csv(result: &Value) -> Result<String, CliError> {
    let single;
    let rows = match result {
        Value::Array(rows) => rows,
        Value::Object(_) => {
            single = [result.clone()];
            &single[..]
        }
        _ => return Err(CliError::usage("CSV needs a table of rows")),
    };
    let mut header: Vec<String> = Vec::new();
    for r in rows {
        let Some(obj) = r.as_object() else {
            return Err(CliError::usage("CSV rows must be objects"));
        };
        for k in obj.keys() {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::failure(format!("csv: {e}"));
    w.write_record(&header).map_err(fail)?;
    for r in rows {
        let obj = r.as_object().expect("checked above");
        w.write_record(header.iter().map(|h| obj.get(h).map(cell).unwrap_or_default()))
            .map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::failure(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("utf-8 cells"))
}
