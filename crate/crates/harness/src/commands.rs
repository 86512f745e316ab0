//! One runner per CLI subcommand. Each writes its files into `out` and
//! returns summary lines; failed certificates surface as
//! [`HarnessError::Certificate`] after the files are written.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use tomolab_core::entanglement::ppt_determinant;
use tomolab_core::extendibility::{build_extension_counterexample, werner_k_extendable, InequalityCheck, XStateParams};
use tomolab_core::families::input_state;
use tomolab_core::filter::protocol::{run_protocol, ProtocolTranscript, TranscriptJson};
use tomolab_core::metrics::fidelity;
use tomolab_core::multicopy::{four_copy_det_observable, two_copy_scheme, TWO_COPY_OUTCOMES};
use tomolab_core::nogo::{cylinder_test, det_constancy_probe, find_counterexample_seeded, pauli_set_without, CounterexampleJson, SearchPhase};
use tomolab_core::random::{derive_seed, random_density_matrix, random_traceless_hermitian, rng_from_seed};
use tomolab_core::reconstruction::{dof_analysis, feasible_states, mle_reconstruct_with, Identifiability, MleOptions};
use tomolab_core::{DensityMatrix, MatrixJson};

use crate::band::concurrence_band;
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::experiment::{protocol_experiment_with, ProtocolExperimentOptions};

#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Summary {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

fn prepare(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    Ok(std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?))
}

fn write_json<S: Serialize>(path: &Path, value: &S, summary: &mut Summary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))?;
    summary.files.push(path.to_path_buf());
    Ok(())
}

fn write_rows<S: Serialize>(path: &Path, rows: &[S], summary: &mut Summary) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))?;
    summary.files.push(path.to_path_buf());
    Ok(())
}

fn certificate(failures: Vec<String>, summary: Summary) -> Result<Summary> {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(HarnessError::Certificate(failures.join("; ")))
    }
}

pub fn band(cfg: &Config, seed: u64, out: &Path) -> Result<Summary> {
    prepare(out)?;
    let report = concurrence_band(cfg.band.lambda_count, cfg.band.samples_per_lambda, &cfg.noise, seed)?;
    let mut summary = Summary::default();
    let path = out.join("band.csv");
    report.write_csv(create(&path)?)?;
    summary.files.push(path);
    let widest = report.rows.iter().filter_map(|r| r.band).map(|b| b.width()).fold(0.0, f64::max);
    summary.line(format!(
        "band: {} lambda values x {} samples, widest 5-95% band {widest:.4} ({:.1}s)",
        cfg.band.lambda_count, cfg.band.samples_per_lambda, report.runtime
    ));
    Ok(summary)
}

#[derive(Serialize)]
struct RunJson {
    lambda: f64,
    fidelity: f64,
    concurrence_ideal: f64,
    concurrence_reconstructed: f64,
    in_band: bool,
    residual: f64,
    spread: f64,
    identifiability: Identifiability,
    input: MatrixJson,
    reconstruction: MatrixJson,
    transcript: TranscriptJson,
}

pub fn protocol(cfg: &Config, seed: u64, out: &Path) -> Result<Summary> {
    prepare(out)?;
    let p = &cfg.protocol;
    let exp = protocol_experiment_with(
        &p.lambdas,
        &cfg.noise,
        seed,
        ProtocolExperimentOptions {
            filters: p.filters,
            restarts: p.restarts,
            band_samples: p.band_samples,
        },
    )?;
    let mut summary = Summary::default();
    let path = out.join("protocol.csv");
    exp.report.write_csv(create(&path)?)?;
    summary.files.push(path);
    let runs: Vec<RunJson> = exp
        .runs
        .iter()
        .map(|r| RunJson {
            lambda: r.lambda,
            fidelity: r.fidelity,
            concurrence_ideal: r.concurrence_ideal,
            concurrence_reconstructed: r.concurrence_reconstructed,
            in_band: r.in_band(),
            residual: r.reconstruction.residual,
            spread: r.reconstruction.spread,
            identifiability: r.reconstruction.identifiability,
            input: r.input.to_json(),
            reconstruction: r.reconstruction.state.to_json(),
            transcript: r.transcript.to_json(),
        })
        .collect();
    write_json(&out.join("protocol_runs.json"), &runs, &mut summary)?;
    summary.line(format!(
        "protocol: {} inputs, median fidelity {:.4}, min fidelity {:.4}, {:.0}% inside the noise band ({:.1}s)",
        exp.runs.len(),
        exp.report.median_fidelity().unwrap_or(f64::NAN),
        exp.report.fidelities().iter().copied().fold(f64::INFINITY, f64::min),
        100.0 * exp.in_band_fraction(),
        exp.report.runtime
    ));
    Ok(summary)
}

#[derive(Serialize)]
struct ReconstructionJson {
    state: MatrixJson,
    residual: f64,
    spread: f64,
    identifiability: Identifiability,
    near_optimal: usize,
    /// Present when the transcript was generated from a known input.
    fidelity_to_input: Option<f64>,
    input: Option<MatrixJson>,
    transcript: TranscriptJson,
}

#[derive(Serialize)]
struct DofRow {
    m: usize,
    constraint_count: usize,
    rank: usize,
    dof: usize,
    concurrence_spread: f64,
    min_pairwise_fidelity: f64,
    feasible: usize,
    attempts: usize,
}

pub fn reconstruct(cfg: &Config, seed: u64, out: &Path) -> Result<Summary> {
    prepare(out)?;
    let rc = &cfg.reconstruct;
    let (transcript, input): (ProtocolTranscript<f64>, Option<DensityMatrix<f64>>) = match &rc.transcript {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
            (ProtocolTranscript::from_json_str(&text)?, None)
        }
        None => {
            let rho = input_state::<f64>(rc.lambda).map_err(HarnessError::at_lambda(rc.lambda))?;
            (run_protocol(&rho, rc.filters).map_err(HarnessError::at_lambda(rc.lambda))?, Some(rho))
        }
    };
    let mut summary = Summary::default();
    let fit = mle_reconstruct_with(
        &transcript,
        MleOptions {
            restarts: rc.restarts,
            seed,
            ..MleOptions::default()
        },
    )?;
    let fid = input.as_ref().map(|rho| fidelity(rho, &fit.state)).transpose()?;
    write_json(
        &out.join("reconstruction.json"),
        &ReconstructionJson {
            state: fit.state.to_json(),
            residual: fit.residual,
            spread: fit.spread,
            identifiability: fit.identifiability,
            near_optimal: fit.near_optimal,
            fidelity_to_input: fid,
            input: input.as_ref().map(|r| r.to_json()),
            transcript: transcript.to_json(),
        },
        &mut summary,
    )?;
    let reference = input.clone().unwrap_or_else(|| fit.state.clone());
    let mut ladder = Vec::new();
    for m in 0..=transcript.num_filters() {
        let ensemble = feasible_states(&transcript, m, rc.ensemble_restarts, derive_seed(seed, m as u64))?;
        write_rows(&out.join(format!("ensemble_m{m}.csv")), &ensemble.rows(&reference)?, &mut summary)?;
        let dof = dof_analysis(&transcript, &reference, m)?;
        ladder.push(DofRow {
            m,
            constraint_count: dof.constraint_count,
            rank: dof.rank,
            dof: dof.dof,
            concurrence_spread: if ensemble.is_empty() { f64::NAN } else { ensemble.concurrence_spread()? },
            min_pairwise_fidelity: if ensemble.is_empty() { f64::NAN } else { ensemble.min_pairwise_fidelity()? },
            feasible: ensemble.len(),
            attempts: ensemble.attempts,
        });
    }
    write_rows(&out.join("dof_ladder.csv"), &ladder, &mut summary)?;
    summary.line(format!(
        "reconstruct: {:?}, residual {:.3e}, spread {:.3e}{}",
        fit.identifiability,
        fit.residual,
        fit.spread,
        fid.map(|f| format!(", fidelity to input {f:.6}")).unwrap_or_default()
    ));
    summary.line(format!(
        "dof ladder: {}",
        ladder.iter().map(|r| r.dof.to_string()).collect::<Vec<_>>().join(" ")
    ));
    Ok(summary)
}

#[derive(Serialize)]
struct NogoRow {
    index: usize,
    ok: bool,
    phase: Option<SearchPhase>,
    t: Option<f64>,
    det_sep: Option<f64>,
    det_ent: Option<f64>,
    projection_gap: Option<f64>,
    witness: Option<f64>,
    probe_t: f64,
    probe_dev: f64,
    message: String,
}

/// Probe deviations at or below this count as "determinant constant along R".
pub const PROBE_TOL: f64 = 1e-8;

pub fn nogo(cfg: &Config, seed: u64, out: &Path) -> Result<Summary> {
    prepare(out)?;
    let nc = &cfg.nogo;
    let rows = (0..nc.directions)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let r = random_traceless_hermitian::<f64, _>(&mut rng, 4);
            let probe = det_constancy_probe(&r, &nc.probe_grid)?;
            let row = match find_counterexample_seeded(&r, derive_seed(seed ^ 0x9e37_79b9, i as u64)) {
                Ok(pair) => NogoRow {
                    index: i,
                    ok: true,
                    phase: Some(pair.phase),
                    t: Some(pair.t),
                    det_sep: Some(pair.certificates.det_sep),
                    det_ent: Some(pair.certificates.det_ent),
                    projection_gap: Some(pair.certificates.projection_gap),
                    witness: Some(pair.witness),
                    probe_t: probe.t_star,
                    probe_dev: probe.dev,
                    message: String::new(),
                },
                Err(e) => NogoRow {
                    index: i,
                    ok: false,
                    phase: None,
                    t: None,
                    det_sep: None,
                    det_ent: None,
                    projection_gap: None,
                    witness: None,
                    probe_t: probe.t_star,
                    probe_dev: probe.dev,
                    message: e.to_string(),
                },
            };
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = Summary::default();
    write_rows(&out.join("nogo_campaign.csv"), &rows, &mut summary)?;
    let successes = rows.iter().filter(|r| r.ok).count();
    let probes = rows.iter().filter(|r| r.probe_dev.abs() > PROBE_TOL).count();
    let mut failures = Vec::new();
    if successes * 100 < 99 * rows.len() {
        failures.push(format!("only {successes}/{} directions produced a certified pair", rows.len()));
    }
    if probes < rows.len() {
        failures.push(format!("determinant constant along {} directions", rows.len() - probes));
    }
    let observables = pauli_set_without::<f64>(&nc.omit);
    match cylinder_test(&observables) {
        Ok(pair) => {
            let c = pair.certificates;
            summary.line(format!(
                "cylinder test ({} observables): det_sep {:.3e}, det_ent {:.3e}, projection gap {:.1e}, verdicts {:?}/{:?}",
                observables.len(),
                c.det_sep,
                c.det_ent,
                c.projection_gap,
                c.sep_verdict,
                c.ent_verdict
            ));
            let json: CounterexampleJson = pair.to_json();
            write_json(&out.join("cylinder_pair.json"), &json, &mut summary)?;
        }
        Err(e) => failures.push(format!("cylinder test: {e}")),
    }
    summary.line(format!(
        "nogo: {successes}/{} certified pairs, {probes}/{} directions with |det deviation| > {PROBE_TOL:e}",
        rows.len(),
        rows.len()
    ));
    certificate(failures, summary)
}

#[derive(Serialize)]
struct MulticopyRow {
    index: usize,
    rank: usize,
    ppt_determinant: f64,
    four_copy: f64,
    two_copy: f64,
    outcomes: usize,
}

pub fn multicopy(cfg: &Config, seed: u64, out: &Path) -> Result<Summary> {
    prepare(out)?;
    let mc = &cfg.multicopy;
    let w = four_copy_det_observable::<f64>();
    let rows = (0..mc.states)
        .into_par_iter()
        .map(|i| {
            let rank = 1 + i % 4;
            let rho = random_density_matrix::<f64>(4, rank, derive_seed(seed, i as u64))?;
            let est = two_copy_scheme(&rho)?;
            Ok(MulticopyRow {
                index: i,
                rank,
                ppt_determinant: ppt_determinant(&rho)?,
                four_copy: w.expectation(&rho)?,
                two_copy: est.det_estimate,
                outcomes: est.outcome_count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = Summary::default();
    write_rows(&out.join("multicopy.csv"), &rows, &mut summary)?;
    let worst = rows
        .iter()
        .map(|r| (r.four_copy - r.ppt_determinant).abs().max((r.two_copy - r.ppt_determinant).abs()))
        .fold(0.0, f64::max);
    let mut failures = Vec::new();
    if worst > mc.tolerance {
        failures.push(format!("estimate error {worst:e} exceeds {:e}", mc.tolerance));
    }
    if let Some(r) = rows.iter().find(|r| r.outcomes != TWO_COPY_OUTCOMES) {
        failures.push(format!("state {} used {} outcomes", r.index, r.outcomes));
    }
    summary.line(format!(
        "multicopy: {} states, worst error {worst:.2e}, {} two-copy outcomes ({} nonzeros in the four-copy observable)",
        rows.len(),
        TWO_COPY_OUTCOMES,
        w.nonzero_count()
    ));
    certificate(failures, summary)
}

#[derive(Serialize)]
struct WernerRow {
    d: usize,
    k: usize,
    threshold: f64,
    extendable_at_threshold: bool,
    extendable_below_threshold: bool,
}

#[derive(Serialize)]
struct ExtensionJson {
    params: XStateParams,
    not_two_extendable: bool,
    inequalities: Vec<InequalityCheck>,
    shifted_ppt_determinant: f64,
    shifted_ppt_min_eigenvalue: f64,
    rho: MatrixJson,
    rho_shifted: MatrixJson,
    direction: MatrixJson,
}

/// Offset below a threshold used to confirm it is sharp.
const THRESHOLD_PROBE: f64 = 1e-9;

pub fn extend(cfg: &Config, _seed: u64, out: &Path) -> Result<Summary> {
    prepare(out)?;
    let ec = &cfg.extend;
    let mut summary = Summary::default();
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for &(d, k) in &ec.werner {
        let threshold = -((d as f64) - 1.0) / k as f64;
        let row = WernerRow {
            d,
            k,
            threshold,
            extendable_at_threshold: werner_k_extendable(threshold, d, k)?,
            extendable_below_threshold: werner_k_extendable(threshold - THRESHOLD_PROBE, d, k)?,
        };
        if !row.extendable_at_threshold || row.extendable_below_threshold {
            failures.push(format!("Werner threshold not sharp at (d, k) = ({d}, {k})"));
        }
        rows.push(row);
    }
    write_rows(&out.join("werner_thresholds.csv"), &rows, &mut summary)?;
    match build_extension_counterexample::<f64>(ec.y, ec.epsilon) {
        Ok(ce) => {
            let not_two = ce.params.extension_obstruction() > 0.0;
            if !not_two {
                failures.push("extension obstruction (x-y)(w-z) is not positive".into());
            }
            write_json(
                &out.join("extension_counterexample.json"),
                &ExtensionJson {
                    params: ce.params,
                    not_two_extendable: not_two,
                    inequalities: ce.inequalities.clone(),
                    shifted_ppt_determinant: ce.shifted_ppt_determinant,
                    shifted_ppt_min_eigenvalue: ce.shifted_ppt_min_eigenvalue,
                    rho: ce.rho.to_json(),
                    rho_shifted: ce.rho_shifted.to_json(),
                    direction: ce.direction.to_json(),
                },
                &mut summary,
            )?;
            summary.line(format!(
                "extend: (y, eps) = ({}, {}), obstruction {:.3e}, shifted det {:.3e}",
                ec.y,
                ec.epsilon,
                ce.params.extension_obstruction(),
                ce.shifted_ppt_determinant
            ));
        }
        Err(e) => failures.push(format!("extension counterexample: {e}")),
    }
    summary.line(format!("extend: {} Werner thresholds checked", rows.len()));
    certificate(failures, summary)
}
