use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::{usage, Command};

/// Record written next to every output file; `ptsl replay` re-runs it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub tool_version: String,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(name: &str, command: &Command, outputs: Vec<PathBuf>, elapsed: Duration) -> anyhow::Result<Self> {
        let mut tagged = serde_json::to_value(command).context("serializing parameters")?;
        let parameters = tagged.get_mut("parameters").map(serde_json::Value::take).unwrap_or_default();
        Ok(Self {
            command: name.to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
            wall_clock_seconds: elapsed.as_secs_f64(),
        })
    }

    pub fn command(&self) -> anyhow::Result<Command> {
        let tagged = serde_json::json!({ "command": self.command, "parameters": self.parameters });
        serde_json::from_value(tagged).map_err(|e| usage(format!("manifest does not describe a runnable command: {e}")))
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid manifest {}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// `out.csv` -> `out.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    output.with_extension("manifest.json")
}
