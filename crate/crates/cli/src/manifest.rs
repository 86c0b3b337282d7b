//! Run manifests: every output directory records the subcommand, its
//! parameters, the seed, content hashes of all inputs and the list of
//! written artifacts. Re-running the same argv and seed reproduces the
//! primary outputs byte for byte; only the timestamp field may differ.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct InputRef {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seed: Option<u64>,
    pub inputs: Vec<InputRef>,
    pub outputs: Vec<String>,
    /// Excluded from reproducibility comparisons.
    pub unix_time_s: u64,
}

/// Per-run bookkeeping shared by all subcommands.
pub struct RunContext {
    subcommand: String,
    output_dir: Option<PathBuf>,
    parameters: BTreeMap<String, serde_json::Value>,
    seed: Option<u64>,
    inputs: Vec<InputRef>,
    outputs: Vec<String>,
}

impl RunContext {
    pub fn new(subcommand: &str, output_dir: Option<PathBuf>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            output_dir,
            parameters: BTreeMap::new(),
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn has_output_dir(&self) -> bool {
        self.output_dir.is_some()
    }

    /// Reads an input file, recording its content hash.
    pub fn read_input(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        let digest = Sha256::digest(&bytes);
        self.inputs.push(InputRef {
            path: path.display().to_string(),
            sha256: hex::encode(digest),
        });
        Ok(bytes)
    }

    /// Writes a primary output into the output directory, if one was given.
    pub fn write_output(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        if let Some(dir) = self.output_dir.clone() {
            fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
            let path = dir.join(name);
            fs::write(&path, content).map_err(|e| CliError::io(&path, e))?;
            self.outputs.push(name.to_string());
        }
        Ok(())
    }

    /// Writes the manifest alongside the outputs.
    pub fn finish(self) -> Result<(), CliError> {
        let Some(dir) = self.output_dir else {
            return Ok(());
        };
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: self.subcommand,
            parameters: self.parameters,
            seed: self.seed,
            inputs: self.inputs,
            outputs: self.outputs,
            unix_time_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let path = dir.join(MANIFEST_FILE);
        let mut json = serde_json::to_string_pretty(&manifest)
            .expect("manifest serializes");
        json.push('\n');
        fs::write(&path, json).map_err(|e| CliError::io(&path, e))
    }
}
