//! Run manifests embedded in every output file.
//!
//! A manifest records the complete command configuration, so `ftlab replay`
//! can regenerate the file. Wall-clock time and worker count do not change
//! the output and are kept out of it.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::commands::Command;

pub const CSV_PREFIX: &str = "# manifest ";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub command: Command,
    /// Whether each row reached the precision target, in row order.
    pub rows_precise: Vec<bool>,
}

impl Manifest {
    pub fn new(command: &Command, rows_precise: Vec<bool>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.clone(),
            rows_precise,
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{CSV_PREFIX}{}\n",
            serde_json::to_string(self).expect("manifest serializes")
        )
    }
}

/// Manifest of a CSV (first comment line) or JSON (`manifest` field) output.
pub fn parse(text: &str) -> Result<Manifest> {
    if let Some(rest) = text.strip_prefix(CSV_PREFIX) {
        let line = rest.lines().next().unwrap_or_default();
        return serde_json::from_str(line).context("malformed CSV manifest line");
    }
    let value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(_) => bail!("input is neither a CSV with a manifest line nor a JSON report"),
    };
    let manifest = value.get("manifest").context("JSON report has no manifest")?;
    serde_json::from_value(manifest.clone()).context("malformed JSON manifest")
}
