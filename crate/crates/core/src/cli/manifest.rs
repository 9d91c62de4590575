use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{artifact_err, CliError};
use crate::moea::{Algorithm, RunConfig};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Artifact file names, relative to the run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub front: String,
    pub history: String,
    pub soc: String,
    pub stats: String,
}

impl Default for Artifacts {
    fn default() -> Self {
        Self {
            front: "front.csv".into(),
            history: "history.csv".into(),
            soc: "soc.csv".into(),
            stats: "stats.json".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub scenario: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub no_bess: bool,
    pub n_batteries: usize,
    pub config: RunConfig,
    pub artifacts: Artifacts,
    pub evaluations: usize,
    pub wall_time: f64,
}

impl RunManifest {
    pub fn read(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| artifact_err(path.display(), e))?;
        serde_json::from_str(&text).map_err(|e| artifact_err(path.display(), e))
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| artifact_err(path.display(), e))
    }
}
