//! Run manifests: enough metadata next to every output file to reproduce
//! it byte-for-byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use wigner_qkd::export;

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// The full resolved parameter set of the run.
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &'static str, seed: Option<u64>, parameters: serde_json::Value) -> Self {
        RunManifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            parameters,
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Write the manifest next to the primary output as
    /// `<stem>.manifest.json`, returning the path written.
    pub fn write_alongside(&self, primary_output: &Path) -> Result<PathBuf, CliError> {
        let path = primary_output.with_extension("manifest.json");
        let json = export::to_json_17sig(self)
            .map_err(|error| CliError::Input(format!("manifest serialization: {error}")))?;
        fs::write(&path, json + "\n").map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}
