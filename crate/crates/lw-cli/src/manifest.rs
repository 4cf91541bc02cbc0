//! Run manifests: enough to reproduce a run and name everything it wrote.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use anyhow::Result;

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    /// SHA-256 of the canonical JSON of the effective configuration.
    pub config_hash: String,
    pub tool_version: String,
    pub seeds: Vec<u64>,
    /// Digests of input files consumed by the run.
    pub input_digests: Vec<FileDigest>,
    /// Every artifact produced by the run, relative to the run directory.
    pub outputs: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> Result<FileDigest> {
    let bytes = std::fs::read(path)?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

impl RunManifest {
    pub fn new<C: Serialize>(config: &C, seeds: Vec<u64>) -> Result<Self> {
        let canonical = serde_json::to_vec(config)?;
        Ok(Self {
            config_hash: sha256_hex(&canonical),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seeds,
            input_digests: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.input_digests.push(digest_file(path)?);
        Ok(())
    }

    pub fn add_output(&mut self, dir: &Path, path: &Path) {
        let rel = path.strip_prefix(dir).unwrap_or(path);
        self.outputs.push(rel.display().to_string());
    }

    /// Write `manifest.json` into the run directory (and list it as an
    /// output).
    pub fn write(mut self, dir: &Path) -> Result<PathBuf> {
        self.outputs.push("manifest.json".to_string());
        self.outputs.sort();
        let path = dir.join("manifest.json");
        let mut bytes = serde_json::to_vec_pretty(&self)?;
        bytes.push(b'\n');
        std::fs::write(&path, bytes)?;
        Ok(path)
    }
}
