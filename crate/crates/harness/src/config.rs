use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiment::DEFAULT_LAMBDAS;
use crate::noise::NoiseModel;

/// Every knob of every subcommand; missing keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub noise: NoiseModel,
    pub band: BandConfig,
    pub protocol: ProtocolConfig,
    pub reconstruct: ReconstructConfig,
    pub nogo: NogoConfig,
    pub multicopy: MulticopyConfig,
    pub extend: ExtendConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandConfig {
    pub lambda_count: usize,
    pub samples_per_lambda: usize,
}

impl Default for BandConfig {
    fn default() -> Self {
        BandConfig {
            lambda_count: 200,
            samples_per_lambda: 2500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub lambdas: Vec<f64>,
    pub filters: usize,
    pub restarts: usize,
    pub band_samples: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            filters: 5,
            restarts: tomolab_core::reconstruction::MIN_RESTARTS,
            band_samples: 2500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructConfig {
    /// Transcript to reconstruct; when absent one is generated from `lambda`.
    pub transcript: Option<PathBuf>,
    pub lambda: f64,
    pub filters: usize,
    pub restarts: usize,
    /// Independent fits per prefix for the feasible-set ensembles.
    pub ensemble_restarts: usize,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        ReconstructConfig {
            transcript: None,
            lambda: 0.2,
            filters: 5,
            restarts: tomolab_core::reconstruction::MIN_RESTARTS,
            ensemble_restarts: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NogoConfig {
    pub directions: usize,
    /// Pauli products `(i, j)` left out of the measured set.
    pub omit: Vec<(usize, usize)>,
    pub probe_grid: Vec<f64>,
}

impl Default for NogoConfig {
    fn default() -> Self {
        NogoConfig {
            directions: 100,
            omit: vec![(3, 3)],
            probe_grid: tomolab_core::nogo::default_probe_grid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MulticopyConfig {
    pub states: usize,
    pub tolerance: f64,
}

impl Default for MulticopyConfig {
    fn default() -> Self {
        MulticopyConfig {
            states: 1000,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtendConfig {
    pub y: f64,
    pub epsilon: f64,
    /// `(d, k)` pairs whose Werner threshold is checked.
    pub werner: Vec<(usize, usize)>,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        ExtendConfig {
            y: 1.0,
            epsilon: 0.01,
            werner: vec![(2, 2), (2, 3), (3, 2)],
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let cfg: Config = serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        cfg.noise.validate()?;
        Ok(cfg)
    }

    /// Shrinks the sampling sizes to the quick CI profile.
    pub fn fast(mut self) -> Self {
        self.band = BandConfig {
            lambda_count: 20,
            samples_per_lambda: 100,
        };
        self.protocol.band_samples = 100;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_keeps_defaults() {
        let cfg: Config = serde_json::from_str(r#"{"band": {"lambda_count": 7}}"#).unwrap();
        assert_eq!(cfg.band.lambda_count, 7);
        assert_eq!(cfg.band.samples_per_lambda, 2500);
        assert_eq!(cfg.noise, NoiseModel::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<Config>(r#"{"bnad": {}}"#).is_err());
    }
}
