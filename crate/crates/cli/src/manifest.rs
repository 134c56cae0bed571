//! Run manifests: config echo, stage timings and a checksummed file inventory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory, with `/` separators.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seedless: bool,
    pub config: Option<RunConfig>,
    pub inputs: Vec<String>,
    pub stages: Vec<StageTiming>,
    pub files: Vec<FileEntry>,
    pub errors: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seedless: bool) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seedless,
            config: None,
            inputs: Vec::new(),
            stages: Vec::new(),
            files: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn stage(&mut self, stage: &str, seconds: f64) {
        self.stages.push(StageTiming { stage: stage.to_string(), seconds });
    }

    /// Records checksums of `paths`, which must lie under `root`.
    pub fn add_files(&mut self, root: &Path, paths: &[PathBuf]) -> Result<(), CliError> {
        for p in paths {
            let bytes = fs::read(p).map_err(|source| CliError::Io { path: p.clone(), source })?;
            let rel = p.strip_prefix(root).unwrap_or(p);
            let path = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
            self.files.push(FileEntry { path, sha256: sha256_hex(&bytes), bytes: bytes.len() as u64 });
        }
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(MANIFEST_FILE);
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, json).map_err(|source| CliError::Io { path: path.clone(), source })?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
