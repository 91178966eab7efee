//! Structured reports: one flat key-sorted map rendered as text or JSON.
//!
//! Identical inputs and engine version produce byte-identical output except
//! for the `timing.ms` field, which is excluded from the determinism
//! guarantee. Reports go to stdout; diagnostics belong on stderr.

use clap::ValueEnum;
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub struct Report {
    fields: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut fields = BTreeMap::new();
        fields.insert("command".to_string(), Value::String(command.to_string()));
        fields.insert(
            "engine.version".to_string(),
            Value::String(format!("flagcalc {}", env!("CARGO_PKG_VERSION"))),
        );
        Report { fields }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.insert(key.to_string(), value.into());
    }

    pub fn set_usize(&mut self, key: &str, value: usize) {
        self.set(key, value as u64);
    }

    /// Renders with the timing field filled in last.
    pub fn finish(mut self, format: Format, elapsed_ms: u128) -> String {
        self.set("timing.ms", elapsed_ms as u64);
        match format {
            Format::Json => {
                let mut obj = serde_json::Map::new();
                for (k, v) in self.fields {
                    obj.insert(k, v);
                }
                let mut out = serde_json::to_string_pretty(&Value::Object(obj))
                    .expect("report serialises");
                out.push('\n');
                out
            }
            Format::Text => {
                let mut out = String::new();
                out.push_str("flagcalc-report v1\n");
                for (k, v) in &self.fields {
                    let rendered = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    if rendered.contains('\n') {
                        out.push_str(&format!("{} = <<<\n", k));
                        out.push_str(&rendered);
                        if !rendered.ends_with('\n') {
                            out.push('\n');
                        }
                        out.push_str(">>>\n");
                    } else {
                        out.push_str(&format!("{} = {}\n", k, rendered));
                    }
                }
                out
            }
        }
    }
}
