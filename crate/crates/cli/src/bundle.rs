//! On-disk result bundle: file names, the shared metadata header, atomic
//! writes and typed reads.

use crate::CliError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sms_core::adequacy::CampaignConfig;
use std::fs;
use std::path::{Path, PathBuf};

pub const CAMPAIGN_FILE: &str = "campaign_results.json";
pub const LRCA_FILE: &str = "lrca_report.json";
pub const STATS_FILE: &str = "stats_report.json";
pub const POWER_FILE: &str = "power_report.json";
pub const DEGENERATION_FILE: &str = "degeneration_report.json";
pub const MUTANT_MANIFEST_FILE: &str = "mutant_manifest.json";
pub const MR_MANIFEST_FILE: &str = "mr_manifest.json";
pub const METADATA_FILE: &str = "run_metadata.json";
pub const HEATMAP_FILE: &str = "heatmap.csv";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Enough configuration to reproduce any number in the file it heads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool_version: String,
    pub seed: u64,
    pub k_eq: usize,
    pub replicates: usize,
}

impl Meta {
    pub fn of(config: &CampaignConfig) -> Meta {
        Meta { tool_version: TOOL_VERSION.into(), seed: config.seed, k_eq: config.k_eq, replicates: config.replicates }
    }
}

/// Every bundle file is a metadata header plus its payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub meta: Meta,
    pub data: T,
}

impl<T> Envelope<T> {
    pub fn new(meta: Meta, data: T) -> Envelope<T> {
        Envelope { meta, data }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::other(format!("serialise: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Files rendered in memory, written only once everything has been computed.
#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(&'static str, String)>,
}

impl Staged {
    pub fn add<T: Serialize>(&mut self, name: &'static str, value: &T) -> Result<(), CliError> {
        self.files.push((name, to_json(value)?));
        Ok(())
    }

    pub fn add_text(&mut self, name: &'static str, text: String) {
        self.files.push((name, text));
    }

    /// Writes each file to a temporary sibling and renames it into place, so
    /// a reader never sees a half-written file.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::other(format!("create {}: {e}", dir.display())))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, text) in self.files {
            let path = dir.join(name);
            let tmp = dir.join(format!(".{name}.tmp"));
            fs::write(&tmp, text).map_err(|e| CliError::other(format!("write {}: {e}", tmp.display())))?;
            fs::rename(&tmp, &path).map_err(|e| CliError::other(format!("rename {}: {e}", path.display())))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Reads a bundle file; absence is reported as a missing input.
pub fn read<T: DeserializeOwned>(dir: &Path, name: &str) -> Result<T, CliError> {
    let path = dir.join(name);
    let text = fs::read_to_string(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::missing(format!("{} not found", path.display())),
        _ => CliError::other(format!("read {}: {e}", path.display())),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::other(format!("parse {}: {e}", path.display())))
}
