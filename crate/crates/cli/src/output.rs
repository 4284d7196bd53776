//! Artifact collection and the run manifest.
//!
//! Results are held in memory until the run succeeds; each file is then
//! written to a temporary name and renamed into place, with the manifest
//! last.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Experiment, RunConfig};
use crate::error::CliError;

pub const OUTPUT_ROOT_ENV: &str = "NUCMEM_OUTPUT_ROOT";

/// Resolves the output directory: an absolute `--out` wins, a relative one
/// is placed under `$NUCMEM_OUTPUT_ROOT` (default `.`), and without either
/// the run goes to `<root>/runs/<experiment>`.
pub fn output_dir(flag: Option<&Path>, cfg: &RunConfig, exp: Experiment) -> PathBuf {
    let root = std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    match flag.or(cfg.output_dir.as_deref()) {
        Some(p) if p.is_absolute() => p.to_path_buf(),
        Some(p) => root.join(p),
        None => root.join("runs").join(exp.as_str()),
    }
}

pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn new() -> Self {
        Artifacts { files: Vec::new() }
    }

    pub fn text(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body.into_bytes()));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value).map_err(nucmem_core::Error::from)?;
        body.push('\n');
        self.text(name, body);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }
}

pub struct Manifest<'a> {
    pub experiment: Experiment,
    pub config: &'a RunConfig,
    pub parameters: Value,
    pub notes: Vec<&'static str>,
    pub started: Instant,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.partial"));
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(format!("writing {}", tmp.display()), e))?;
    std::fs::rename(&tmp, &target).map_err(|e| CliError::io(format!("renaming to {}", target.display()), e))
}

/// Writes every artifact, then `manifest.json`.
pub fn commit(dir: &Path, artifacts: Artifacts, manifest: Manifest<'_>) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let mut listed = Vec::with_capacity(artifacts.files.len());
    for (name, bytes) in &artifacts.files {
        write_atomic(dir, name, bytes)?;
        listed.push(json!({ "file": name, "bytes": bytes.len(), "sha256": sha256_hex(bytes) }));
    }
    let doc = json!({
        "tool": "nucmem",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": manifest.experiment.as_str(),
        "seed": manifest.config.seed.unwrap_or(0),
        "config": manifest.config,
        "parameters": manifest.parameters,
        "artifacts": listed,
        "notes": manifest.notes,
        "float_format": "scientific, 17 significant digits",
        "wall_time_seconds": manifest.started.elapsed().as_secs_f64(),
    });
    let mut body = serde_json::to_string_pretty(&doc).map_err(nucmem_core::Error::from)?;
    body.push('\n');
    write_atomic(dir, "manifest.json", body.as_bytes())
}
