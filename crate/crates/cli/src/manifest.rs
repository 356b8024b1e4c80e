//! Run manifests embedded in every output file.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const PREFIX: &str = "# manifest: ";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// The full argument set of the command, including seeds and paths.
    pub args: Value,
}

impl Manifest {
    pub fn new<A: Serialize>(command: &str, args: &A) -> Manifest {
        Manifest {
            tool: "isicode".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            args: serde_json::to_value(args).expect("arguments serialize"),
        }
    }

    pub fn comment_line(&self) -> String {
        format!("{PREFIX}{}\n", serde_json::to_string(self).expect("manifest serializes"))
    }

    /// Finds the manifest in a text file (`# manifest:` line) or a JSON
    /// report (`manifest` field).
    pub fn extract(path: &str, text: &str) -> Result<Manifest, CliError> {
        let bad = |msg: &str| CliError::Parse { path: path.into(), line: 0, msg: msg.into() };
        if text.trim_start().starts_with('{') {
            let v: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
            let m = v.get("manifest").ok_or_else(|| bad("no manifest field"))?;
            return serde_json::from_value(m.clone()).map_err(|e| bad(&e.to_string()));
        }
        let line = text
            .lines()
            .find_map(|l| l.strip_prefix(PREFIX))
            .ok_or_else(|| bad("no manifest line"))?;
        serde_json::from_str(line).map_err(|e| bad(&e.to_string()))
    }
}
