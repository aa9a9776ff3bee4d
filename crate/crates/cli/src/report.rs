use std::fmt::Display;

use clap::ValueEnum;
use framebound::{Error, Result};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Ordered `key: value` lines for the text format.
#[derive(Default)]
pub struct Rows(Vec<(String, String)>);

impl Rows {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }
}

pub struct Report {
    json: Value,
    text: String,
}

impl Report {
    pub fn new(payload: &impl Serialize, rows: Rows) -> Result<Self> {
        let width = rows.0.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let text = rows.0.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect();
        Self::with_text(payload, text)
    }

    pub fn with_text(payload: &impl Serialize, text: String) -> Result<Self> {
        let json = serde_json::to_value(payload).map_err(|e| Error::Numerical(format!("report serialization: {e}")))?;
        Ok(Self { json, text })
    }

    /// Header carries the command and seed; the body depends on `format`.
    pub fn render(&self, format: Format, command: &str, seed: u64) -> String {
        match format {
            Format::Text => {
                let mut out = format!("# framebound {command} seed={seed}\n{}", self.text);
                if !out.ends_with('\n') {
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let doc = serde_json::json!({ "command": command, "seed": seed, "report": self.json });
                let mut out = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
                out.push('\n');
                out
            }
        }
    }
}
