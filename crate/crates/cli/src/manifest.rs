//! Run manifests written next to every output.
//!
//! Field names:
//! - `command`: subcommand name
//! - `version`: package version of the binary
//! - `timestamp`: RFC 3339 UTC start time (the only field that differs
//!   between reruns)
//! - `params`: every command-line parameter after defaults are applied
//! - `rng`: random generator and stream convention
//! - `exec`: `sequential` or `parallel`
//! - `inputs`, `outputs`: file paths read and written
//! - `notes`: data caveats, such as series read without timestamps
//! - `result`: optional command-specific summary

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

pub const RNG: &str = "ChaCha8 (rand_chacha): seed_from_u64(seed), set_stream(draw index)";

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub timestamp: String,
    pub params: Value,
    pub rng: &'static str,
    pub exec: &'static str,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
}

impl RunManifest {
    pub fn new(command: &str, params: &impl Serialize, exec: &'static str) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            params: serde_json::to_value(params).unwrap_or(Value::Null),
            rng: RNG,
            exec,
            inputs: Vec::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
            result: None,
        }
    }

    pub fn input(&mut self, p: &Path) {
        self.inputs.push(p.display().to_string());
    }

    pub fn output(&mut self, p: &Path) {
        self.outputs.push(p.display().to_string());
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(path, text)
    }
}

/// `<out>.manifest.json` next to an output file.
pub fn sidecar_for(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
