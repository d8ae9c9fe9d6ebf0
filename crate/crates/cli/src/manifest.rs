//! Run manifests: what a subcommand read and wrote, with content hashes.
//! Timestamps live here and nowhere else, so the artifacts themselves stay
//! byte-identical across reruns.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Classify, CliResult, Failure};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRef {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub tool_version: String,
    pub config: Value,
    pub config_hash: String,
    pub inputs: Vec<FileRef>,
    pub outputs: Vec<FileRef>,
    pub started_at: String,
    pub finished_at: String,
}

/// Collects inputs and outputs while a subcommand runs.
#[derive(Debug)]
pub struct Run {
    subcommand: String,
    config: Value,
    inputs: Vec<FileRef>,
    outputs: Vec<FileRef>,
    started_at: String,
}

impl Run {
    pub fn start(subcommand: &str, config: Value) -> Self {
        Run {
            subcommand: subcommand.into(),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_at: now(),
        }
    }

    pub fn set_config(&mut self, config: Value) {
        self.config = config;
    }

    /// Reads a UTF-8 input file and records its hash.
    pub fn read(&mut self, path: &Path) -> CliResult<String> {
        let bytes = fs::read(path).classify(Failure::Io, format!("reading {}", path.display()))?;
        self.inputs.push(FileRef { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        String::from_utf8(bytes).classify(Failure::Validation, format!("{} is not UTF-8", path.display()))
    }

    pub fn write(&mut self, path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
        let bytes = contents.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).classify(Failure::Io, format!("creating {}", dir.display()))?;
        }
        fs::write(path, bytes).classify(Failure::Io, format!("writing {}", path.display()))?;
        self.record_output(path, bytes);
        Ok(())
    }

    pub fn record_output(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs.push(FileRef { path: path.display().to_string(), sha256: sha256_hex(bytes) });
    }

    pub fn outputs(&self) -> &[FileRef] {
        &self.outputs
    }

    /// Writes the manifest to `path` and returns it.
    pub fn finish(self, path: &Path) -> CliResult<RunManifest> {
        let manifest = RunManifest {
            config_hash: sha256_hex(serde_json::to_string(&self.config).expect("JSON value").as_bytes()),
            subcommand: self.subcommand,
            tool_version: TOOL_VERSION.into(),
            config: self.config,
            inputs: self.inputs,
            outputs: self.outputs,
            started_at: self.started_at,
            finished_at: now(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("serializable manifest") + "\n";
        fs::write(path, text).classify(Failure::Io, format!("writing {}", path.display()))?;
        Ok(manifest)
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Manifest location for a run whose single output is a file.
pub fn manifest_for_file(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}
