//! Run manifests: a JSON record of what produced which files, sufficient to
//! reproduce the run bit for bit.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_clock_secs: f64,
    pub outputs: Vec<String>,
}

pub struct ManifestBuilder {
    command: String,
    config: serde_json::Value,
    seed: Option<u64>,
    started: Instant,
    outputs: Vec<String>,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            config,
            seed,
            started: Instant::now(),
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(mut self, path: &Path) -> std::io::Result<()> {
        self.outputs.push(path.display().to_string());
        let manifest = RunManifest {
            command: self.command,
            config: self.config,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_secs: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
        };
        std::fs::write(path, serde_json::to_string_pretty(&manifest).unwrap())
    }
}
