use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

use crate::spin::Axis;
use crate::TOOL_VERSION;

/// Self-describing result: every file carries the command, its full
/// parameter set and the tool version next to the values.
#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope<V: Serialize> {
    pub command: &'static str,
    pub tool_version: &'static str,
    pub parameters: Value,
    pub values: V,
}

impl<V: Serialize> ResultEnvelope<V> {
    pub fn new(command: &'static str, parameters: Value, values: V) -> Self {
        Self {
            command,
            tool_version: TOOL_VERSION,
            parameters,
            values,
        }
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// `key,value` rows with nested objects flattened to dotted keys.
    pub fn to_csv(&self) -> anyhow::Result<String> {
        let value = serde_json::to_value(self)?;
        let mut rows = Vec::new();
        flatten("", &value, &mut rows);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["key", "value"])?;
        for (k, v) in rows {
            w.write_record([k, v])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Rounds to nine decimals, matching the text form used in CSV files.
pub fn degrees_9(deg: f64) -> f64 {
    (deg * 1e9).round() / 1e9
}

pub fn axis_json(axis: &Axis) -> Value {
    serde_json::json!({
        "alpha_deg": degrees_9(axis.polar_deg()),
        "beta_deg": degrees_9(axis.azimuth_deg()),
    })
}

/// Writes `contents` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, contents).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents)?;
            out.flush()?;
            Ok(())
        }
    }
}
