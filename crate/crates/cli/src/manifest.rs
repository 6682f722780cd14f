use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    /// Digest of the file, or of the sorted file list and contents for a
    /// directory.
    pub sha256: String,
}

/// Written beside every output so the producing configuration can be
/// recovered from it.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub parallel_build: bool,
    pub command: String,
    pub argv: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config: Value, seed: Option<u64>) -> Self {
        Manifest {
            tool: "algorec",
            version: env!("CARGO_PKG_VERSION"),
            core_version: algorec_core::VERSION,
            parallel_build: algorec_core::Execution::parallel_available(),
            command: command.to_string(),
            argv: std::env::args().collect(),
            config,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: digest(path)?,
        });
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(CliError::data)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
    }
}

/// `out.jsonl` gets `out.jsonl.manifest.json`.
pub fn beside(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn digest(path: &Path) -> Result<String, CliError> {
    let read = |p: &Path| std::fs::read(p).map_err(|e| CliError::data(format!("cannot read {}: {e}", p.display())));
    let mut h = Sha256::new();
    if path.is_dir() {
        let mut files: Vec<PathBuf> = walkdir::WalkDir::new(path)
            .into_iter()
            .filter_map(Result::ok)
            .filter(|e| e.file_type().is_file())
            .map(walkdir::DirEntry::into_path)
            .collect();
        files.sort();
        for f in files {
            h.update(f.strip_prefix(path).unwrap_or(&f).to_string_lossy().as_bytes());
            h.update([0u8]);
            h.update(read(&f)?);
        }
    } else {
        h.update(read(path)?);
    }
    Ok(hex::encode(h.finalize()))
}
