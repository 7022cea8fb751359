//! The run manifest (`manifest.toml`) and run-directory loading.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use ideal_core::data::{load_roll_calls, DataFormat};
use ideal_core::draws::DrawsMeta;
use ideal_core::{PosteriorDraws, RollCallMatrix};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const DRAWS_DIR: &str = "draws";
pub const FILTERED_DATA_FILE: &str = "data_filtered.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub seed: u64,
    pub data_path: PathBuf,
    pub data_sha256: String,
    /// Digest of the effective configuration (output location excluded).
    pub config_sha256: String,
    /// Digest of configuration and every input file.
    pub run_sha256: String,
    pub draws_sha256: String,
    pub parameter_count: usize,
    pub retained_draws_per_chain: usize,
    pub wall_time_secs: f64,
    pub jitter_events: usize,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub previous_run: Option<RerunCheck>,
    pub config: RunConfig,
    pub draws: DrawsMeta,
}

/// Comparison with the manifest that a run replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RerunCheck {
    pub identical_inputs: bool,
    pub identical_draws: bool,
}

impl RerunCheck {
    pub fn describe(&self) -> &'static str {
        match (self.identical_inputs, self.identical_draws) {
            (true, true) => "identical re-run: same configuration, data and draws",
            (true, false) => "same configuration and data as the previous run, but the draws differ",
            (false, _) => "configuration or data changed since the previous run",
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let k = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if k == 0 {
            break;
        }
        hasher.update(&buf[..k]);
    }
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Digest of the configuration with location-only fields blanked, so that
/// moving the output directory does not change it.
pub fn config_digest(config: &RunConfig) -> Result<String> {
    let mut c = config.clone();
    c.output.dir = PathBuf::new();
    c.data.path = None;
    c.party.group_file = None;
    Ok(sha256_hex(c.to_toml()?.as_bytes()))
}

pub fn run_digest(config_sha: &str, inputs: &[&str]) -> String {
    let mut text = String::from(config_sha);
    for d in inputs {
        text.push('\n');
        text.push_str(d);
    }
    sha256_hex(text.as_bytes())
}

/// Digest over the draw files present in `dir`, in a fixed order.
pub fn draws_digest(dir: &Path) -> Result<String> {
    let mut parts = Vec::new();
    for name in ["mu.csv", "alpha.csv", "beta.csv", "delta.csv"] {
        let path = dir.join(name);
        if path.exists() {
            parts.push(format!("{name}:{}", file_sha256(&path)?));
        }
    }
    Ok(sha256_hex(parts.join("\n").as_bytes()))
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        toml::from_str(&text).map_err(|e| CliError::run_dir(dir, format!("{MANIFEST_FILE}: {e}")))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        crate::output::write_toml(&dir.join(MANIFEST_FILE), self)
    }
}

/// A finished `fit` output directory.
pub struct RunDir {
    pub path: PathBuf,
    pub manifest: Manifest,
}

impl RunDir {
    pub fn open(path: &Path) -> Result<Self> {
        if !path.join(MANIFEST_FILE).exists() {
            return Err(CliError::run_dir(path, format!("no {MANIFEST_FILE}; run `ideal fit` first")));
        }
        Ok(RunDir {
            path: path.to_path_buf(),
            manifest: Manifest::read(path)?,
        })
    }

    pub fn draws(&self) -> Result<PosteriorDraws> {
        let mut draws =
            PosteriorDraws::read_blocks(&self.path.join(DRAWS_DIR), self.manifest.draws.clone())?;
        draws.wall_time_secs = self.manifest.wall_time_secs;
        draws.jitter_events = self.manifest.jitter_events;
        draws.notes = self.manifest.notes.clone();
        Ok(draws)
    }

    /// The filtered matrix the draws were fitted to.
    pub fn matrix(&self) -> Result<RollCallMatrix> {
        Ok(load_roll_calls(&self.path.join(FILTERED_DATA_FILE), DataFormat::Csv)?)
    }
}
