// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON writers plus the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Fixed-width scientific notation used in every numeric column.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// Comma-separated table with a header row.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    /// File name relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub preset: String,
    /// SHA-256 of the canonical JSON of the effective run configuration.
    pub config_hash: String,
    pub dims: Vec<usize>,
    pub integrator: Value,
    pub convergence_rule: String,
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
    pub outputs: Vec<OutputEntry>,
}

/// Collects the files of one run and writes them with a manifest.
pub struct Run {
    dir: PathBuf,
    command: String,
    started: Instant,
    started_unix_s: u64,
    previous: Option<RunManifest>,
    outputs: Vec<OutputEntry>,
}

impl Run {
    /// Prepares `dir`. With `verify`, the existing manifest of `command` is
    /// loaded for comparison and must exist.
    pub fn start(dir: &Path, command: &str, verify: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
        let previous = if verify {
            let path = manifest_path(dir, command);
            let text = fs::read_to_string(&path).map_err(|e| {
                CliError::usage(format!("--verify needs {}: {e}", path.display()))
            })?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| CliError::usage(format!("unreadable manifest {}: {e}", path.display())))?,
            )
        } else {
            None
        };
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.into(),
            started: Instant::now(),
            started_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            previous,
            outputs: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.retain(|o| o.path != name);
        self.outputs.push(OutputEntry {
            path: name.into(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::usage(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes the manifest. With verification, every output listed in the
    /// previous manifest must reappear with the same checksum.
    pub fn finish(
        self,
        preset: &str,
        config: &Value,
        dims: Vec<usize>,
        integrator: Value,
        convergence_rule: &str,
    ) -> Result<(), CliError> {
        let canonical = serde_json::to_vec(config).map_err(|e| CliError::usage(e.to_string()))?;
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.clone(),
            preset: preset.into(),
            config_hash: sha256_hex(&canonical),
            dims,
            integrator,
            convergence_rule: convergence_rule.into(),
            started_unix_s: self.started_unix_s,
            wall_clock_s: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs.clone(),
        };
        let path = manifest_path(&self.dir, &self.command);
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::usage(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;

        if let Some(prev) = self.previous {
            let mut bad = Vec::new();
            for old in &prev.outputs {
                match self.outputs.iter().find(|o| o.path == old.path) {
                    Some(new) if new.sha256 == old.sha256 => {}
                    Some(_) => bad.push(format!("{}: checksum changed", old.path)),
                    None => bad.push(format!("{}: not produced", old.path)),
                }
            }
            if prev.config_hash != manifest.config_hash {
                bad.push("configuration differs from the verified run".into());
            }
            if !bad.is_empty() {
                return Err(CliError::numerical(format!("verification failed: {}", bad.join("; "))));
            }
            println!("verified {} outputs against {}", prev.outputs.len(), path.display());
        }
        Ok(())
    }
}

pub fn manifest_path(dir: &Path, command: &str) -> PathBuf {
    dir.join(format!("{command}.manifest.json"))
}
