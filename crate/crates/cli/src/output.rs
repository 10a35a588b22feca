//! Input digests, staged outputs and the run manifest.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

pub const MANIFEST_NAME: &str = "run_manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Everything a subcommand reads and writes. Outputs are staged in temp
/// files beside their destination and only renamed into place by
/// [`RunContext::commit`]; dropping the context discards them.
#[derive(Default)]
pub struct RunContext {
    inputs: Vec<FileDigest>,
    staged: Vec<(NamedTempFile, PathBuf)>,
    created_dirs: Vec<PathBuf>,
    committed: bool,
    pub details: serde_json::Map<String, serde_json::Value>,
}

impl RunContext {
    /// Reads a whole input file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.record_input(path, &bytes);
        Ok(bytes)
    }

    pub fn read_string(&mut self, path: &Path) -> Result<String> {
        let bytes = self.read(path)?;
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: digest(bytes),
        });
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("detail serializes");
        self.details.insert(key.to_string(), v);
    }

    fn ensure_dir(&mut self, dir: &Path) -> Result<()> {
        if dir.as_os_str().is_empty() || dir.is_dir() {
            return Ok(());
        }
        if let Some(parent) = dir.parent() {
            self.ensure_dir(parent)?;
        }
        fs::create_dir(dir).with_context(|| format!("creating {}", dir.display()))?;
        self.created_dirs.push(dir.to_path_buf());
        Ok(())
    }

    /// Stages `path`, filling it through `f`.
    pub fn write<F>(&mut self, path: &Path, f: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> fringeweb::Result<()>,
    {
        if self.staged.iter().any(|(_, p)| p == path) {
            anyhow::bail!("output {} named twice", path.display());
        }
        let dir = path.parent().unwrap_or(Path::new("")).to_path_buf();
        self.ensure_dir(&dir)?;
        let tmp_dir = if dir.as_os_str().is_empty() {
            Path::new(".")
        } else {
            dir.as_path()
        };
        let mut tmp = NamedTempFile::new_in(tmp_dir)
            .with_context(|| format!("staging {}", path.display()))?;
        {
            let mut w = BufWriter::new(tmp.as_file_mut());
            f(&mut w)?;
            w.flush()?;
        }
        self.staged.push((tmp, path.to_path_buf()));
        Ok(())
    }

    /// Renames staged outputs into place, then writes the manifest.
    pub fn commit(mut self, manifest_path: &Path, mut manifest: Manifest) -> Result<()> {
        let staged = std::mem::take(&mut self.staged);
        for (tmp, path) in &staged {
            let bytes = fs::read(tmp.path())?;
            manifest.outputs.push(FileDigest {
                path: path.display().to_string(),
                sha256: digest(&bytes),
            });
        }
        manifest.inputs = std::mem::take(&mut self.inputs);
        manifest.details = std::mem::take(&mut self.details);
        for (tmp, path) in staged {
            tmp.persist(&path)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        self.write(manifest_path, |w| {
            serde_json::to_writer_pretty(&mut *w, &manifest)?;
            w.write_all(b"\n")?;
            Ok(())
        })?;
        let (tmp, path) = self.staged.pop().expect("manifest staged");
        tmp.persist(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        self.committed = true;
        Ok(())
    }
}

impl Drop for RunContext {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        // Staged temp files delete themselves; remove directories we made.
        self.staged.clear();
        for dir in self.created_dirs.iter().rev() {
            let _ = fs::remove_dir(dir);
        }
    }
}

/// Contents of `run_manifest.json`. Nothing here depends on the clock or
/// the worker count, so repeated runs produce identical manifests.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub cli_version: &'static str,
    pub core_version: &'static str,
    pub parallel: bool,
    pub subcommand: &'static str,
    pub seed: u64,
    /// Effective arguments after config merging, without `--jobs`.
    pub args: Vec<String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub details: serde_json::Map<String, serde_json::Value>,
}

impl Manifest {
    pub fn new(subcommand: &'static str, seed: u64, args: Vec<String>) -> Self {
        Manifest {
            tool: "fringeweb",
            cli_version: env!("CARGO_PKG_VERSION"),
            core_version: fringeweb::VERSION,
            parallel: fringeweb::par::is_parallel(),
            subcommand,
            seed,
            args,
            inputs: Vec::new(),
            outputs: Vec::new(),
            details: Default::default(),
        }
    }
}
