//! Run configuration and the JSON report envelope.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use trolab_core::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: usize,
    pub restarts: usize,
    pub tolerances: Tolerances,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 200,
            restarts: 8,
            tolerances: Tolerances::default(),
            output_path: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("--trials must be positive");
        }
        if self.restarts == 0 {
            bail!("--restarts must be positive");
        }
        self.tolerances.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 over the input files, in argument order.
    pub inputs_digest: String,
    pub config: RunConfig,
    pub results: Value,
    pub version: String,
}

impl Report {
    pub fn new(command: &str, inputs: &[Vec<u8>], config: &RunConfig, results: Value) -> Self {
        Self {
            command: command.to_string(),
            inputs_digest: digest(inputs),
            config: config.clone(),
            results,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub fn digest(inputs: &[Vec<u8>]) -> String {
    let mut hasher = Sha256::new();
    for bytes in inputs {
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(bytes);
    }
    hex::encode(hasher.finalize())
}

pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn parse_json<T: serde::de::DeserializeOwned>(bytes: &[u8], path: &Path) -> Result<T> {
    serde_json::from_slice(bytes).with_context(|| format!("malformed JSON in {}", path.display()))
}
