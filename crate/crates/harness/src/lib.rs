//! Seeded experiment driver on top of `tomolab-core`: noise-band sweeps,
//! protocol reconstructions, no-go campaigns and the multi-copy and
//! extendibility checks, written out as CSV and JSON.

pub mod band;
pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod noise;

pub use band::{concurrence_band, lambda_grid, ExperimentReport, LambdaRow, Quantiles};
pub use config::Config;
pub use error::{HarnessError, Result};
pub use experiment::{protocol_experiment, protocol_experiment_with, ProtocolExperiment, ProtocolRun};
pub use noise::{noise_sample, perturb, NoiseComponents, NoiseModel};
