//! The alternating filter protocol and its measurement transcript.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{apply_filter, filter_from_marginal, ExecutionPath, FilterOp};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Subsystem};
use crate::scalar::{lit, to_f64, Real};
use crate::state::{expect_dim, DensityMatrix, MatrixJson};

/// Trace-norm distance of both marginals from `I/2` that counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-4;
/// Filter cap for open-ended runs.
pub const MAX_FILTERS: usize = 50;

const PROB_SLACK: f64 = 1e-12;
const CUMULATIVE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolStep<T: Real> {
    pub side: Subsystem,
    pub filter: FilterOp<T>,
    /// Marginal of the other qubit, measured right after this filter.
    pub marginal: DensityMatrix<T>,
    pub success_prob: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTranscript<T: Real> {
    /// `(ρ_A^0, ρ_B^0)`.
    pub initial_marginals: (DensityMatrix<T>, DensityMatrix<T>),
    pub steps: Vec<ProtocolStep<T>>,
    pub cumulative_success: T,
}

/// Side of the `index`-th filter; the sequence starts on A.
pub fn side_of_step(index: usize) -> Subsystem {
    if index % 2 == 0 {
        Subsystem::A
    } else {
        Subsystem::B
    }
}

impl<T: Real> ProtocolTranscript<T> {
    pub fn num_filters(&self) -> usize {
        self.steps.len()
    }

    /// Every recorded marginal in measurement order, labelled by qubit.
    pub fn marginals(&self) -> Vec<(Subsystem, &DensityMatrix<T>)> {
        let mut out = vec![
            (Subsystem::A, &self.initial_marginals.0),
            (Subsystem::B, &self.initial_marginals.1),
        ];
        out.extend(self.steps.iter().map(|s| (s.side.other(), &s.marginal)));
        out
    }

    /// The first `m` filters with their marginals.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m > self.steps.len() {
            return Err(Error::TranscriptTooShort {
                steps: self.steps.len(),
                required: m,
            });
        }
        let steps = self.steps[..m].to_vec();
        let cumulative_success = steps.iter().fold(T::one(), |acc, s| acc * s.success_prob);
        Ok(ProtocolTranscript {
            initial_marginals: self.initial_marginals.clone(),
            steps,
            cumulative_success,
        })
    }

    pub fn validate(&self) -> Result<()> {
        expect_dim(2, self.initial_marginals.0.dim())?;
        expect_dim(2, self.initial_marginals.1.dim())?;
        let mut product = 1.0;
        for (i, step) in self.steps.iter().enumerate() {
            if step.side != side_of_step(i) {
                return Err(Error::at_step(
                    i,
                    Error::Format(format!("filter on {} breaks the A/B alternation", step.side)),
                ));
            }
            expect_dim(2, step.marginal.dim()).map_err(|e| Error::at_step(i, e))?;
            let p = to_f64(step.success_prob);
            if !(p > 0.0 && p <= 1.0 + PROB_SLACK) {
                return Err(Error::at_step(i, Error::out_of_range("success_prob", p, 0.0, 1.0)));
            }
            product *= p;
        }
        let c = to_f64(self.cumulative_success);
        if (c - product).abs() > CUMULATIVE_REL_TOL * product.max(f64::MIN_POSITIVE) {
            return Err(Error::Format(format!(
                "cumulative_success {c:e} is not the product of step probabilities {product:e}"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> TranscriptJson {
        TranscriptJson {
            initial_marginals: [self.initial_marginals.0.to_json(), self.initial_marginals.1.to_json()],
            steps: self
                .steps
                .iter()
                .map(|s| StepJson {
                    side: s.side,
                    filter: FilterJson::from_matrix(&s.filter.f),
                    gamma: to_f64(s.filter.gamma),
                    theta: to_f64(s.filter.theta),
                    marginal: s.marginal.to_json(),
                    success_prob: to_f64(s.success_prob),
                })
                .collect(),
            cumulative_success: to_f64(self.cumulative_success),
        }
    }

    pub fn from_json(j: &TranscriptJson) -> Result<Self> {
        let steps = j
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let build = || -> Result<ProtocolStep<T>> {
                    Ok(ProtocolStep {
                        side: s.side,
                        filter: FilterOp::with_recorded(s.filter.to_matrix()?, lit(s.gamma), lit(s.theta))?,
                        marginal: DensityMatrix::from_json(&s.marginal)?,
                        success_prob: lit(s.success_prob),
                    })
                };
                build().map_err(|e| Error::at_step(i, e))
            })
            .collect::<Result<Vec<_>>>()?;
        let transcript = ProtocolTranscript {
            initial_marginals: (
                DensityMatrix::from_json(&j.initial_marginals[0])?,
                DensityMatrix::from_json(&j.initial_marginals[1])?,
            ),
            steps,
            cumulative_success: lit(j.cumulative_success),
        };
        transcript.validate()?;
        Ok(transcript)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

/// Row-major 2×2 filter matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl FilterJson {
    fn from_matrix<T: Real>(m: &CMatrix<T>) -> Self {
        let mut re = Vec::with_capacity(4);
        let mut im = Vec::with_capacity(4);
        for r in 0..2 {
            for c in 0..2 {
                re.push(to_f64(m[(r, c)].re));
                im.push(to_f64(m[(r, c)].im));
            }
        }
        FilterJson { re, im }
    }

    fn to_matrix<T: Real>(&self) -> Result<CMatrix<T>> {
        if self.re.len() != 4 || self.im.len() != 4 {
            return Err(Error::Format(format!(
                "filter needs 4 entries per part, got {} and {}",
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(CMatrix::from_fn(2, 2, |r, c| {
            Complex::new(lit(self.re[2 * r + c]), lit(self.im[2 * r + c]))
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepJson {
    pub side: Subsystem,
    pub filter: FilterJson,
    pub gamma: f64,
    pub theta: f64,
    pub marginal: MatrixJson,
    pub success_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptJson {
    pub initial_marginals: [MatrixJson; 2],
    pub steps: Vec<StepJson>,
    pub cumulative_success: f64,
}

/// Per-step execution applies each new filter to the current state; packed
/// execution composes all filters on a side into one operator applied to the
/// initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ExecutionMode {
    #[default]
    PerStep,
    Packed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProtocolOptions {
    pub mode: ExecutionMode,
    pub path: ExecutionPath,
}

#[derive(Debug, Clone)]
pub struct ProtocolOutcome<T: Real> {
    pub transcript: ProtocolTranscript<T>,
    pub final_state: DensityMatrix<T>,
}

/// Largest trace-norm distance of either marginal from `I/2`.
pub fn marginal_deviation<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let half = DensityMatrix::<T>::maximally_mixed(2);
    let mut worst = T::zero();
    for side in [Subsystem::A, Subsystem::B] {
        let m = rho.partial_trace(side)?;
        worst = worst.max(linalg::trace_norm_hermitian(&(m.matrix() - half.matrix())));
    }
    Ok(worst)
}

/// Incremental protocol execution; `observe` turns a true marginal into the
/// recorded one (identity for noiseless tomography).
pub struct ProtocolRunner<T: Real, O> {
    rho0: DensityMatrix<T>,
    state: DensityMatrix<T>,
    options: ProtocolOptions,
    observe: O,
    latest: [DensityMatrix<T>; 2],
    packed: [CMatrix<T>; 2],
    transcript: ProtocolTranscript<T>,
}

fn slot(side: Subsystem) -> usize {
    match side {
        Subsystem::A => 0,
        Subsystem::B => 1,
    }
}

impl<T, O> ProtocolRunner<T, O>
where
    T: Real,
    O: FnMut(Subsystem, &DensityMatrix<T>) -> Result<DensityMatrix<T>>,
{
    pub fn new(rho0: &DensityMatrix<T>, options: ProtocolOptions, mut observe: O) -> Result<Self> {
        expect_dim(4, rho0.dim())?;
        let ma = observe(Subsystem::A, &rho0.partial_trace(Subsystem::A)?)?;
        let mb = observe(Subsystem::B, &rho0.partial_trace(Subsystem::B)?)?;
        Ok(ProtocolRunner {
            rho0: rho0.clone(),
            state: rho0.clone(),
            options,
            observe,
            latest: [ma.clone(), mb.clone()],
            packed: [linalg::identity(2), linalg::identity(2)],
            transcript: ProtocolTranscript {
                initial_marginals: (ma, mb),
                steps: Vec::new(),
                cumulative_success: T::one(),
            },
        })
    }

    pub fn state(&self) -> &DensityMatrix<T> {
        &self.state
    }

    pub fn transcript(&self) -> &ProtocolTranscript<T> {
        &self.transcript
    }

    pub fn step(&mut self) -> Result<()> {
        let index = self.transcript.steps.len();
        self.advance(index).map_err(|e| Error::at_step(index, e))
    }

    fn advance(&mut self, index: usize) -> Result<()> {
        let side = side_of_step(index);
        let filter = filter_from_marginal(&self.latest[slot(side)])?;
        let prev = self.transcript.cumulative_success;
        let (state, cumulative) = match self.options.mode {
            ExecutionMode::PerStep => {
                let (s, p) = apply_filter(&self.state, &filter, side, self.options.path)?;
                (s, prev * p)
            }
            ExecutionMode::Packed => {
                self.packed[slot(side)] = filter.kraus() * &self.packed[slot(side)];
                let a = FilterOp::from_matrix(self.packed[0].clone())?;
                let b = FilterOp::from_matrix(self.packed[1].clone())?;
                let (s, pa) = apply_filter(&self.rho0, &a, Subsystem::A, self.options.path)?;
                let (s, pb) = apply_filter(&s, &b, Subsystem::B, self.options.path)?;
                // The packed operators were renormalized; restore the weight of
                // the product of per-step Kraus operators.
                (s, pa * pb * a.scale * a.scale * b.scale * b.scale)
            }
        };
        let success_prob = cumulative / prev;
        let other = side.other();
        let marginal = (self.observe)(other, &state.partial_trace(other)?)?;
        self.latest[slot(other)] = marginal.clone();
        self.state = state;
        self.transcript.cumulative_success = cumulative;
        self.transcript.steps.push(ProtocolStep {
            side,
            filter,
            marginal,
            success_prob,
        });
        Ok(())
    }

    pub fn finish(self) -> ProtocolOutcome<T> {
        ProtocolOutcome {
            transcript: self.transcript,
            final_state: self.state,
        }
    }
}

fn exact<T: Real>(_: Subsystem, m: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    Ok(m.clone())
}

/// Runs `num_filters` alternating filters with exact marginal tomography.
pub fn run_protocol<T: Real>(rho0: &DensityMatrix<T>, num_filters: usize) -> Result<ProtocolTranscript<T>> {
    Ok(run_protocol_with(rho0, num_filters, ProtocolOptions::default(), exact)?.transcript)
}

pub fn run_protocol_with<T, O>(
    rho0: &DensityMatrix<T>,
    num_filters: usize,
    options: ProtocolOptions,
    observe: O,
) -> Result<ProtocolOutcome<T>>
where
    T: Real,
    O: FnMut(Subsystem, &DensityMatrix<T>) -> Result<DensityMatrix<T>>,
{
    let mut runner = ProtocolRunner::new(rho0, options, observe)?;
    for _ in 0..num_filters {
        runner.step()?;
    }
    Ok(runner.finish())
}

/// Filters until both marginals are within `threshold` of `I/2` or `cap`
/// filters have been applied.
pub fn run_until_converged<T: Real>(
    rho0: &DensityMatrix<T>,
    threshold: f64,
    cap: usize,
) -> Result<ProtocolOutcome<T>> {
    let mut runner = ProtocolRunner::new(rho0, ProtocolOptions::default(), exact)?;
    while runner.transcript().num_filters() < cap && to_f64(marginal_deviation(runner.state())?) >= threshold {
        runner.step()?;
    }
    Ok(runner.finish())
}
