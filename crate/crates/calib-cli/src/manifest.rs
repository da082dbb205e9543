//! Run manifests: every command records what it ran, what it read, and
//! every file it wrote. Outputs are a pure function of (command, config,
//! seed); only the timestamps vary between identical runs.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<String>,
    pub seed: u64,
    pub tool_version: &'static str,
    pub input_sha256: String,
    pub outputs: Vec<String>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

pub struct ManifestBuilder {
    command: String,
    config: Option<String>,
    seed: u64,
    input_sha256: String,
    outputs: Vec<String>,
    started_unix_ms: u128,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn hex_sha256(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl ManifestBuilder {
    /// Starts a manifest; `input` is the byte content the run is a
    /// function of (config file bytes, or the target name for `derive`).
    pub fn new(command: &str, config: Option<&Path>, input: &[u8], seed: u64) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            config: config.map(|p| p.display().to_string()),
            seed,
            input_sha256: hex_sha256(input),
            outputs: Vec::new(),
            started_unix_ms: now_ms(),
        }
    }

    pub fn record(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Writes `manifest.json` into the output directory, listing itself.
    pub fn write(mut self, out_dir: &Path) -> io::Result<PathBuf> {
        let path = out_dir.join("manifest.json");
        self.outputs.push(path.display().to_string());
        let manifest = RunManifest {
            command: self.command,
            config: self.config,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            input_sha256: self.input_sha256,
            outputs: self.outputs,
            started_unix_ms: self.started_unix_ms,
            finished_unix_ms: now_ms(),
        };
        let mut body = serde_json::to_string_pretty(&manifest)?;
        body.push('\n');
        fs::write(&path, body)?;
        Ok(path)
    }
}
