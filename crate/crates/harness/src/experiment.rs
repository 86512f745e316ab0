use rayon::prelude::*;
use tomolab_core::entanglement::concurrence;
use tomolab_core::families::input_state;
use tomolab_core::filter::protocol::{run_protocol_with, ProtocolOptions, ProtocolTranscript};
use tomolab_core::metrics::fidelity;
use tomolab_core::random::{derive_seed, rng_from_seed};
use tomolab_core::reconstruction::{mle_reconstruct_with, MleOptions, MleResult, MIN_RESTARTS};
use tomolab_core::DensityMatrix;

use crate::band::{band_at, ExperimentReport, LambdaRow, Quantiles};
use crate::error::{HarnessError, Result};
use crate::noise::{perturb, NoiseModel};

/// λ values of the six prepared inputs.
pub const DEFAULT_LAMBDAS: [f64; 6] = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7];

#[derive(Debug, Clone, Copy)]
pub struct ProtocolExperimentOptions {
    pub filters: usize,
    pub restarts: usize,
    /// Noisy samples behind each λ's concurrence band.
    pub band_samples: usize,
}

impl Default for ProtocolExperimentOptions {
    fn default() -> Self {
        ProtocolExperimentOptions {
            filters: 5,
            restarts: MIN_RESTARTS,
            band_samples: 2500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub lambda: f64,
    pub input: DensityMatrix<f64>,
    pub transcript: ProtocolTranscript<f64>,
    pub reconstruction: MleResult<f64>,
    pub fidelity: f64,
    pub concurrence_ideal: f64,
    pub concurrence_reconstructed: f64,
    pub band: Quantiles,
}

impl ProtocolRun {
    pub fn in_band(&self) -> bool {
        self.band.contains(self.concurrence_reconstructed)
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolExperiment {
    pub report: ExperimentReport,
    pub runs: Vec<ProtocolRun>,
}

impl ProtocolExperiment {
    pub fn in_band_fraction(&self) -> f64 {
        if self.runs.is_empty() {
            return 0.0;
        }
        self.runs.iter().filter(|r| r.in_band()).count() as f64 / self.runs.len() as f64
    }
}

pub fn protocol_experiment(lambdas: &[f64], model: &NoiseModel, seed: u64) -> Result<ProtocolExperiment> {
    protocol_experiment_with(lambdas, model, seed, ProtocolExperimentOptions::default())
}

/// Runs the filter protocol on each input with readout noise of radius
/// `model.components.fitting` on every measured marginal, then reconstructs
/// the input from the transcript.
pub fn protocol_experiment_with(
    lambdas: &[f64],
    model: &NoiseModel,
    seed: u64,
    opts: ProtocolExperimentOptions,
) -> Result<ProtocolExperiment> {
    model.validate()?;
    let start = std::time::Instant::now();
    let runs = lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| run_one(lambda, model, derive_seed(seed, i as u64), opts))
        .collect::<Result<Vec<_>>>()?;
    let report = ExperimentReport {
        lambda_grid: lambdas.to_vec(),
        rows: runs
            .iter()
            .map(|r| LambdaRow {
                lambda: r.lambda,
                concurrence_ideal: r.concurrence_ideal,
                concurrence_reconstructed: Some(r.concurrence_reconstructed),
                fidelity: Some(r.fidelity),
                band: Some(r.band),
            })
            .collect(),
        seed,
        model: *model,
        runtime: start.elapsed().as_secs_f64(),
    };
    report.validate()?;
    Ok(ProtocolExperiment { report, runs })
}

fn run_one(lambda: f64, model: &NoiseModel, seed: u64, opts: ProtocolExperimentOptions) -> Result<ProtocolRun> {
    let ctx = HarnessError::at_lambda;
    let input = input_state::<f64>(lambda).map_err(ctx(lambda))?;
    let readout = model.components.fitting;
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let outcome = run_protocol_with(&input, opts.filters, ProtocolOptions::default(), |_, marginal: &DensityMatrix<f64>| {
        perturb(marginal, readout, &mut rng)
    })
    .map_err(ctx(lambda))?;
    let reconstruction = mle_reconstruct_with(
        &outcome.transcript,
        MleOptions {
            restarts: opts.restarts,
            seed: derive_seed(seed, 1),
            ..MleOptions::default()
        },
    )
    .map_err(ctx(lambda))?;
    let band = band_at(lambda, opts.band_samples, model, derive_seed(seed, 2))?;
    Ok(ProtocolRun {
        lambda,
        fidelity: fidelity(&input, &reconstruction.state).map_err(ctx(lambda))?,
        concurrence_ideal: concurrence(&input).map_err(ctx(lambda))?.value,
        concurrence_reconstructed: concurrence(&reconstruction.state).map_err(ctx(lambda))?.value,
        input,
        transcript: outcome.transcript,
        reconstruction,
        band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_runs_are_faithful() {
        let exp = protocol_experiment_with(
            &DEFAULT_LAMBDAS,
            &NoiseModel::zero(),
            5,
            ProtocolExperimentOptions {
                band_samples: 10,
                ..Default::default()
            },
        )
        .unwrap();
        for run in &exp.runs {
            assert!(run.fidelity > 0.999, "lambda {}: {}", run.lambda, run.fidelity);
            assert!(run.band.width() < 1e-10 && (run.band.q50 - run.concurrence_ideal).abs() < 1e-10);
            assert!((run.concurrence_reconstructed - run.concurrence_ideal).abs() < 1e-3);
        }
    }

    #[test]
    fn lambda_errors_carry_context() {
        let err = protocol_experiment(&[1.5], &NoiseModel::zero(), 0).unwrap_err();
        assert!(err.to_string().contains("1.5"), "{err}");
    }
}
