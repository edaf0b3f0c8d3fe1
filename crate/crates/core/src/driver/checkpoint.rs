//! JSON checkpoints holding everything needed to continue a run bit for bit:
//! the configuration, the interface, the multistep history and the record.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::SimulationConfig;
use super::record::RunRecord;
use crate::dynamics::StepperHistory;
use crate::geometry::InterfaceState;

pub const CHECKPOINT_FORMAT: &str = "tumor-bim-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupted checkpoint: {0}")]
    Corrupt(String),
    #[error("checkpoint version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("checkpoint does not match the configuration: {0}")]
    Incompatible(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config: SimulationConfig,
    /// Steps taken so far.
    pub steps: u64,
    pub state: InterfaceState,
    pub history: Option<StepperHistory>,
    pub record: RunRecord,
}

/// Only the header is parsed first so that a version mismatch is reported as
/// such rather than as a field error.
#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

impl Checkpoint {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CheckpointError> {
        if text.trim().is_empty() {
            return Err(CheckpointError::Corrupt("empty file".into()));
        }
        let header: Header =
            serde_json::from_str(text).map_err(|e| CheckpointError::Corrupt(e.to_string()))?;
        if header.format != CHECKPOINT_FORMAT {
            return Err(CheckpointError::Corrupt(format!(
                "unknown format `{}`",
                header.format
            )));
        }
        if header.version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Version {
                found: header.version,
                expected: CHECKPOINT_VERSION,
            });
        }
        let ck: Self =
            serde_json::from_str(text).map_err(|e| CheckpointError::Corrupt(e.to_string()))?;
        ck.validate()?;
        Ok(ck)
    }

    pub fn write(&self, path: &Path) -> Result<(), CheckpointError> {
        // Write then rename so an interrupted write never leaves a torn file.
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, self.to_json())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, CheckpointError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Internal consistency: sizes agree with the configuration and the
    /// record is ordered.
    pub fn validate(&self) -> Result<(), CheckpointError> {
        let corrupt = |m: String| CheckpointError::Corrupt(m);
        self.config.validate().map_err(|e| corrupt(e.to_string()))?;
        self.state.validate().map_err(|e| corrupt(e.to_string()))?;
        let n = self.config.numerics.n;
        if self.state.n_markers() != n {
            return Err(corrupt(format!(
                "state has {} markers, config says {n}",
                self.state.n_markers()
            )));
        }
        match &self.history {
            Some(h) if h.n_hat.len() != n => {
                return Err(corrupt(format!(
                    "history has {} modes, expected {n}",
                    h.n_hat.len()
                )));
            }
            Some(h) if h.steps != self.steps => {
                return Err(corrupt(
                    "history step count disagrees with checkpoint".into(),
                ));
            }
            None if self.steps != 0 => return Err(corrupt("missing multistep history".into())),
            _ => {}
        }
        self.record.validate().map_err(|e| corrupt(e.to_string()))?;
        Ok(())
    }
}
