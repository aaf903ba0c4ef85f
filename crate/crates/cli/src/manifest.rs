use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const FILE_NAME: &str = "manifest.json";

/// Output key under which the hash of standard output is recorded.
pub const STDOUT_KEY: &str = "<stdout>";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Everything needed to reproduce a run and check the reproduction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, verbatim.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
    /// Input name to SHA-256 of the bytes it was parsed from.
    pub inputs: BTreeMap<String, String>,
    /// Output file name (or [`STDOUT_KEY`]) to SHA-256 of its content.
    pub outputs: BTreeMap<String, String>,
    pub exit_code: i32,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read manifest `{}`: {e}", path.display())))?;
        Ok(treedom::json::from_str(&text)?)
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(dir.join(FILE_NAME), text + "\n").map_err(|e| CliError::Io(e.to_string()))
    }
}
