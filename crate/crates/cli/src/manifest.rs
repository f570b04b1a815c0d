//! `manifest.json`: what was run, with a content hash for every artifact.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::presets::PRESET_VERSION;
use crate::runner::RunError;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileEntry {
    pub fn for_bytes(path: &str, data: &[u8]) -> Self {
        Self {
            path: path.to_string(),
            sha256: sha256_hex(data),
            bytes: data.len() as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub preset_version: u32,
    pub config_sha256: String,
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub workers: usize,
    pub wall_time_s: f64,
    pub notes: Vec<String>,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, workers: usize, wall_time_s: f64, notes: Vec<String>, files: Vec<FileEntry>) -> Self {
        let canonical = config.to_canonical_json();
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            preset_version: PRESET_VERSION,
            config_sha256: sha256_hex(canonical.as_bytes()),
            config: serde_json::from_str(&canonical).expect("canonical config is JSON"),
            master_seed: config.run.master_seed,
            workers,
            wall_time_s,
            notes,
            files,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<(), RunError> {
        let path = dir.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes") + "\n";
        std::fs::write(&path, text).map_err(|source| RunError::Io { path, source })
    }

    pub fn read(dir: &Path) -> Result<Self, RunError> {
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| RunError::Setup(format!("{}: {e}", path.display())))
    }
}

/// Re-hashes every listed file. Returns the paths that are missing or differ.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>, RunError> {
    let manifest = Manifest::read(dir)?;
    let mut bad = Vec::new();
    for f in &manifest.files {
        match std::fs::read(dir.join(&f.path)) {
            Ok(data) if FileEntry::for_bytes(&f.path, &data) == *f => {}
            _ => bad.push(f.path.clone()),
        }
    }
    Ok(bad)
}
