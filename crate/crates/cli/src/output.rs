use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use miura_core::CliffordField;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub grid_hash: Option<String>,
    pub outputs: Vec<OutputEntry>,
}

/// Collects artifacts in one directory and records their digests.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<OutputEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(OutputEntry { file: name.into(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    pub fn write_field(&mut self, name: &str, field: &CliffordField) -> Result<(), CliError> {
        let mut buf = Vec::new();
        field.write_csv(&mut buf)?;
        self.write_bytes(name, &buf)
    }

    pub fn write_with(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<(), CliError> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| CliError::io(&self.root.join(name), e))?;
        self.write_bytes(name, &buf)
    }

    pub fn finish(mut self, mut manifest: Manifest) -> Result<PathBuf, CliError> {
        manifest.outputs = std::mem::take(&mut self.written);
        let path = self.root.join(MANIFEST);
        let mut f = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::to_writer_pretty(&mut f, &manifest).map_err(|e| CliError::Internal(e.to_string()))?;
        writeln!(f).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
