//! Run manifests: what was run, with which seeds, producing which files.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::error::CliError;

/// A seed used by one chain or estimator stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedUse {
    pub master: u64,
    pub purpose: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub spec_sha256: String,
    pub code_version: String,
    pub command: String,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
    pub seeds: Vec<SeedUse>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn start(spec_sha256: &str, command: &str) -> Self {
        let now = Utc::now();
        Self {
            spec_sha256: spec_sha256.into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            started: now,
            finished: now,
            seeds: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn seed(&mut self, master: u64, purpose: impl Into<String>, seed: u64) {
        self.seeds.push(SeedUse {
            master,
            purpose: purpose.into(),
            seed,
        });
    }

    /// Stamps the finish time and writes `manifest.json` into `dir`.
    pub fn finish(mut self, dir: &Path) -> Result<PathBuf, CliError> {
        self.finished = Utc::now();
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_seeds_and_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::start("abc", "sample");
        m.seed(1, "chain0", 42);
        m.outputs.push(dir.path().join("sample.csv"));
        let path = m.finish(dir.path()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(v["spec_sha256"], "abc");
        assert_eq!(v["seeds"][0]["seed"], 42);
        assert_eq!(v["outputs"].as_array().unwrap().len(), 1);
        assert!(v["started"].as_str().unwrap() <= v["finished"].as_str().unwrap());
    }
}
