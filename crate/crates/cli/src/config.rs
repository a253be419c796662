//! Experiment file: one TOML document with optional tables per experiment.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use ucp_ofdm::experiments::{ClipSweepConfig, PaprConfig, WanderExperiment};
use ucp_ofdm::link::LinkConfig;
use ucp_ofdm::Error;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub link: LinkConfig,
    pub papr: PaprConfig,
    pub wander: WanderExperiment,
    pub sweep: ClipSweepConfig,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
