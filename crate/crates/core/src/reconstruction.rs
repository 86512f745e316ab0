//! Recovering the input state from a filter-protocol transcript.
//!
//! The recorded filters are treated as fixed operators. A candidate state is
//! pushed through them and its simulated marginals (and optionally success
//! probabilities) are compared with the recorded ones.

use nalgebra::{Matrix2, Matrix4, SVD};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::filter::protocol::ProtocolTranscript;
use crate::filter::MIN_SUCCESS_PROB;
use crate::linalg::{self, CMatrix, Subsystem};
use crate::metrics::{fidelity, trace_distance};
use crate::optim::{levenberg_marquardt, numeric_jacobian, LevenbergMarquardtOptions};
use crate::random::{derive_seed, rng_from_seed};
use crate::scalar::{lit, to_f64, Real};
use crate::state::{DensityMatrix, PauliVector};

type C64 = Complex<f64>;
type M2 = Matrix2<C64>;
type M4 = Matrix4<C64>;

/// Candidates at or below this residual satisfy the transcript.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Distinct optima farther apart than this (trace distance) mean the data do
/// not pin down the state.
pub const UNIQUENESS_TOL: f64 = 1e-4;
/// Relative singular-value cutoff for the constraint Jacobian rank.
pub const RANK_TOL: f64 = 1e-7;
pub const MIN_RESTARTS: usize = 32;
/// Transcript length required by [`mle_reconstruct`].
pub const MLE_MIN_FILTERS: usize = 5;
/// A best residual above this means no restart fit the data at all.
pub const STAGNATION_RESIDUAL: f64 = 1.0;
const PSD_SLACK: f64 = 1e-12;
/// Iteration budget in the Cholesky parametrization before polishing.
const COARSE_ITERATIONS: usize = 60;

const PARAMS: usize = 16;
const INFEASIBLE_PENALTY: f64 = 1e3;

fn to_m4<T: Real>(m: &CMatrix<T>) -> M4 {
    M4::from_fn(|r, c| Complex::new(to_f64(m[(r, c)].re), to_f64(m[(r, c)].im)))
}

fn to_m2<T: Real>(m: &CMatrix<T>) -> M2 {
    M2::from_fn(|r, c| Complex::new(to_f64(m[(r, c)].re), to_f64(m[(r, c)].im)))
}

fn from_m4<T: Real>(m: &M4) -> CMatrix<T> {
    CMatrix::from_fn(4, 4, |r, c| Complex::new(lit(m[(r, c)].re), lit(m[(r, c)].im)))
}

fn kron_side(k: &M2, side: Subsystem) -> M4 {
    M4::from_fn(|r, c| {
        let (ra, rb, ca, cb) = (r / 2, r % 2, c / 2, c % 2);
        match side {
            Subsystem::A if rb == cb => k[(ra, ca)],
            Subsystem::B if ra == ca => k[(rb, cb)],
            _ => Complex::new(0.0, 0.0),
        }
    })
}

fn reduced(m: &M4, keep: Subsystem) -> M2 {
    M2::from_fn(|r, c| match keep {
        Subsystem::A => m[(2 * r, 2 * c)] + m[(2 * r + 1, 2 * c + 1)],
        Subsystem::B => m[(r, c)] + m[(r + 2, c + 2)],
    })
}

fn bloch2(m: &M2) -> [f64; 3] {
    let t = (m[(0, 0)] + m[(1, 1)]).re;
    [
        2.0 * m[(0, 1)].re / t,
        -2.0 * m[(0, 1)].im / t,
        (m[(0, 0)] - m[(1, 1)]).re / t,
    ]
}

fn bloch_of<T: Real>(rho: &DensityMatrix<T>) -> [f64; 3] {
    let b = crate::state::bloch_of(rho.matrix());
    [to_f64(b[0]), to_f64(b[1]), to_f64(b[2])]
}

#[derive(Debug, Clone)]
struct StepData {
    side: Subsystem,
    kraus: M2,
    marginal: [f64; 3],
    success_prob: f64,
}

/// The transcript prefix reduced to what the residual needs, in `f64`.
#[derive(Debug, Clone)]
pub struct ConstraintModel {
    initial: [[f64; 3]; 2],
    steps: Vec<StepData>,
    use_success_probs: bool,
}

impl ConstraintModel {
    pub fn new<T: Real>(transcript: &ProtocolTranscript<T>, prefix: usize, use_success_probs: bool) -> Result<Self> {
        if prefix > transcript.num_filters() {
            return Err(Error::TranscriptTooShort {
                steps: transcript.num_filters(),
                required: prefix,
            });
        }
        Ok(ConstraintModel {
            initial: [
                bloch_of(&transcript.initial_marginals.0),
                bloch_of(&transcript.initial_marginals.1),
            ],
            steps: transcript.steps[..prefix]
                .iter()
                .map(|s| StepData {
                    side: s.side,
                    kraus: to_m2(&s.filter.kraus()),
                    marginal: bloch_of(&s.marginal),
                    success_prob: to_f64(s.success_prob),
                })
                .collect(),
            use_success_probs,
        })
    }

    pub fn prefix(&self) -> usize {
        self.steps.len()
    }

    /// Marginal constraints (three Bloch components per recorded marginal)
    /// plus one per success probability when those are used.
    pub fn constraint_count(&self) -> usize {
        6 + self.steps.len() * if self.use_success_probs { 4 } else { 3 }
    }

    /// Simulated marginal Bloch vectors, optionally interleaved with success
    /// probabilities; `None` when a post-selection becomes impossible.
    fn simulate(&self, rho: &M4, with_probs: bool) -> Option<Vec<f64>> {
        let tr = rho.trace().re;
        if !(tr > 0.0) {
            return None;
        }
        let mut state = rho / Complex::new(tr, 0.0);
        let mut out = Vec::with_capacity(6 + 4 * self.steps.len());
        out.extend(bloch2(&reduced(&state, Subsystem::A)));
        out.extend(bloch2(&reduced(&state, Subsystem::B)));
        for step in &self.steps {
            let k = kron_side(&step.kraus, step.side);
            let post = k * state * k.adjoint();
            let p = post.trace().re;
            if !(p > MIN_SUCCESS_PROB) {
                return None;
            }
            state = post / Complex::new(p, 0.0);
            out.extend(bloch2(&reduced(&state, step.side.other())));
            if with_probs {
                out.push(p);
            }
        }
        Some(out)
    }

    fn targets(&self, with_probs: bool) -> Vec<f64> {
        let mut out: Vec<f64> = self.initial.iter().flatten().copied().collect();
        for s in &self.steps {
            out.extend(s.marginal);
            if with_probs {
                out.push(s.success_prob);
            }
        }
        out
    }

    fn residual_vector(&self, rho: &M4) -> Option<Vec<f64>> {
        let sim = self.simulate(rho, self.use_success_probs)?;
        Some(
            sim.iter()
                .zip(self.targets(self.use_success_probs))
                .map(|(s, t)| s - t)
                .collect(),
        )
    }

    /// Sum of squared deviations; `+∞` when the candidate cannot pass a filter.
    pub fn residual(&self, rho: &M4) -> f64 {
        self.residual_vector(rho)
            .map(|r| r.iter().map(|e| e * e).sum())
            .unwrap_or(f64::INFINITY)
    }

    fn fit_residuals(&self, params: &[f64]) -> Vec<f64> {
        let len = self.constraint_count();
        match params_to_state(params).and_then(|rho| self.residual_vector(&rho)) {
            Some(r) => r,
            None => vec![INFEASIBLE_PENALTY; len],
        }
    }

    /// One local fit from a random start; returns the state and its residual.
    fn fit_from_seed(&self, seed: u64) -> Option<(M4, f64)> {
        let mut rng = rng_from_seed(seed);
        let x0: Vec<f64> = (0..PARAMS).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let opts = LevenbergMarquardtOptions {
            max_iter: COARSE_ITERATIONS,
            ..LevenbergMarquardtOptions::default()
        };
        let min = levenberg_marquardt(|p| self.fit_residuals(p), &x0, opts);
        let rho = params_to_state(&min.x)?;
        Some(self.polish(rho))
    }

    /// The Cholesky parametrization curves the valley near rank-deficient
    /// Jacobians; finishing in the affine Pauli coordinates converges where
    /// it crawls. The polished point is kept only if it stays a state.
    fn polish(&self, rho: M4) -> (M4, f64) {
        let start_residual = self.residual(&rho);
        if start_residual <= LevenbergMarquardtOptions::default().cost_tol {
            return (rho, start_residual);
        }
        let len = self.constraint_count();
        let coords = |c: &[f64]| -> M4 {
            let mut pv = PauliVector::<f64> { coeffs: [0.0; 15] };
            pv.coeffs.copy_from_slice(c);
            to_m4(&pv.to_matrix())
        };
        let c0: Vec<f64> = PauliVector::from_matrix(&from_m4::<f64>(&rho)).coeffs.to_vec();
        let min = levenberg_marquardt(
            |c| self.residual_vector(&coords(c)).unwrap_or_else(|| vec![INFEASIBLE_PENALTY; len]),
            &c0,
            LevenbergMarquardtOptions::default(),
        );
        let polished = coords(&min.x);
        let psd = linalg::hermitian_eigenvalues(&from_m4::<f64>(&polished))[0] >= -PSD_SLACK;
        let polished_residual = self.residual(&polished);
        if psd && polished_residual < start_residual {
            (polished, polished_residual)
        } else {
            (rho, start_residual)
        }
    }
}

/// `T T† / tr(T T†)` for lower-triangular `T` with real diagonal
/// `params[0..4]` and complex strict lower part `params[4..16]`.
fn params_to_state(params: &[f64]) -> Option<M4> {
    let mut t = M4::zeros();
    for i in 0..4 {
        t[(i, i)] = Complex::new(params[i], 0.0);
    }
    let mut k = 4;
    for i in 1..4 {
        for j in 0..i {
            t[(i, j)] = Complex::new(params[k], params[k + 1]);
            k += 2;
        }
    }
    let m = t * t.adjoint();
    let tr = m.trace().re;
    if !(tr > 1e-300) || !tr.is_finite() {
        return None;
    }
    Some(m / Complex::new(tr, 0.0))
}

/// Residual of `candidate` against the first `prefix` filters of `transcript`.
pub fn constraint_residual<T: Real>(
    candidate: &DensityMatrix<T>,
    transcript: &ProtocolTranscript<T>,
    prefix: usize,
) -> Result<f64> {
    crate::state::expect_dim(4, candidate.dim())?;
    let model = ConstraintModel::new(transcript, prefix, false)?;
    Ok(model.residual(&to_m4(candidate.matrix())))
}

/// Same as [`constraint_residual`] with the success probabilities added as
/// constraints.
pub fn constraint_residual_with_probs<T: Real>(
    candidate: &DensityMatrix<T>,
    transcript: &ProtocolTranscript<T>,
    prefix: usize,
) -> Result<f64> {
    crate::state::expect_dim(4, candidate.dim())?;
    let model = ConstraintModel::new(transcript, prefix, true)?;
    Ok(model.residual(&to_m4(candidate.matrix())))
}

#[derive(Debug, Clone)]
pub struct FeasibleEnsemble<T: Real> {
    pub candidates: Vec<DensityMatrix<T>>,
    pub residuals: Vec<f64>,
    pub prefix_length: usize,
    /// Number of restarts attempted.
    pub attempts: usize,
}

/// One row of the ensemble CSV export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRow {
    pub candidate_id: usize,
    pub residual: f64,
    pub concurrence: f64,
    pub fidelity_to_reference: f64,
}

impl<T: Real> FeasibleEnsemble<T> {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Fewer than a tenth of the restarts ended feasible.
    pub fn is_sparse(&self) -> bool {
        self.candidates.len() * 10 < self.attempts
    }

    pub fn concurrences(&self) -> Result<Vec<f64>> {
        self.candidates.iter().map(|c| Ok(to_f64(concurrence(c)?.value))).collect()
    }

    /// `max − min` of the candidates' concurrences.
    pub fn concurrence_spread(&self) -> Result<f64> {
        let c = self.concurrences()?;
        if c.is_empty() {
            return Ok(0.0);
        }
        let max = c.iter().copied().fold(f64::MIN, f64::max);
        let min = c.iter().copied().fold(f64::MAX, f64::min);
        Ok(max - min)
    }

    /// Smallest pairwise fidelity between candidates.
    pub fn min_pairwise_fidelity(&self) -> Result<f64> {
        let mut worst: f64 = 1.0;
        for i in 0..self.candidates.len() {
            for j in i + 1..self.candidates.len() {
                worst = worst.min(to_f64(fidelity(&self.candidates[i], &self.candidates[j])?));
            }
        }
        Ok(worst)
    }

    pub fn rows(&self, reference: &DensityMatrix<T>) -> Result<Vec<EnsembleRow>> {
        self.candidates
            .iter()
            .zip(&self.residuals)
            .enumerate()
            .map(|(candidate_id, (c, &residual))| {
                Ok(EnsembleRow {
                    candidate_id,
                    residual,
                    concurrence: to_f64(concurrence(c)?.value),
                    fidelity_to_reference: to_f64(fidelity(c, reference)?),
                })
            })
            .collect()
    }
}

/// `n` independent local fits against the first `prefix` filters; keeps the
/// ones that reach [`FEASIBILITY_TOL`].
pub fn feasible_states<T: Real>(
    transcript: &ProtocolTranscript<T>,
    prefix: usize,
    n: usize,
    seed: u64,
) -> Result<FeasibleEnsemble<T>> {
    if n == 0 {
        return Err(Error::out_of_range("n", 0.0, 1.0, f64::INFINITY));
    }
    let model = ConstraintModel::new(transcript, prefix, false)?;
    let fits: Vec<Option<(M4, f64)>> = (0..n as u64)
        .into_par_iter()
        .map(|i| model.fit_from_seed(derive_seed(seed, i)))
        .collect();
    let mut candidates = Vec::new();
    let mut residuals = Vec::new();
    for (rho, residual) in fits.into_iter().flatten() {
        if residual <= FEASIBILITY_TOL {
            candidates.push(DensityMatrix::new(linalg::hermitian_part(&from_m4::<T>(&rho)))?);
            residuals.push(residual);
        }
    }
    Ok(FeasibleEnsemble {
        candidates,
        residuals,
        prefix_length: prefix,
        attempts: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Identifiability {
    Unique,
    /// Near-optimal fits disagree: the data leave the state undetermined.
    Underdetermined,
}

#[derive(Debug, Clone, Copy)]
pub struct MleOptions {
    pub restarts: usize,
    pub seed: u64,
    pub use_success_probs: bool,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            restarts: MIN_RESTARTS,
            seed: 0,
            use_success_probs: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MleResult<T: Real> {
    pub state: DensityMatrix<T>,
    pub residual: f64,
    /// Largest trace distance from the best fit among near-optimal fits.
    pub spread: f64,
    pub identifiability: Identifiability,
    /// Restarts whose residual is within the near-optimal band.
    pub near_optimal: usize,
}

/// Least-squares fit of the whole transcript from multiple random starts.
pub fn mle_reconstruct<T: Real>(transcript: &ProtocolTranscript<T>) -> Result<MleResult<T>> {
    mle_reconstruct_with(transcript, MleOptions::default())
}

pub fn mle_reconstruct_with<T: Real>(transcript: &ProtocolTranscript<T>, opts: MleOptions) -> Result<MleResult<T>> {
    if transcript.num_filters() < MLE_MIN_FILTERS {
        return Err(Error::TranscriptTooShort {
            steps: transcript.num_filters(),
            required: MLE_MIN_FILTERS,
        });
    }
    let restarts = opts.restarts.max(MIN_RESTARTS);
    let model = ConstraintModel::new(transcript, transcript.num_filters(), opts.use_success_probs)?;
    let mut fits: Vec<(M4, f64)> = (0..restarts as u64)
        .into_par_iter()
        .filter_map(|i| model.fit_from_seed(derive_seed(opts.seed, i)))
        .filter(|(_, r)| r.is_finite())
        .collect();
    fits.sort_by(|a, b| a.1.total_cmp(&b.1));
    let best_residual = fits.first().map(|f| f.1).unwrap_or(f64::INFINITY);
    if !(best_residual <= STAGNATION_RESIDUAL) {
        return Err(Error::Stagnation { best_residual });
    }
    let band = best_residual * (1.0 + 1e-3) + FEASIBILITY_TOL;
    let to_state = |m: &M4| DensityMatrix::<T>::new(linalg::hermitian_part(&from_m4::<T>(m)));
    let best = to_state(&fits[0].0)?;
    let mut spread: f64 = 0.0;
    let mut near_optimal = 0;
    for (m, r) in &fits {
        if *r <= band {
            near_optimal += 1;
            spread = spread.max(to_f64(trace_distance(&best, &to_state(m)?)?));
        }
    }
    Ok(MleResult {
        state: best,
        residual: best_residual,
        spread,
        identifiability: if spread > UNIQUENESS_TOL {
            Identifiability::Underdetermined
        } else {
            Identifiability::Unique
        },
        near_optimal,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofReport {
    pub m: usize,
    pub constraint_count: usize,
    pub rank: usize,
    pub dof: usize,
    pub singular_values: Vec<f64>,
}

/// Local degrees of freedom left by the first `prefix` filters' marginals:
/// 15 minus the rank of the constraint Jacobian at `rho0`.
pub fn dof_analysis<T: Real>(
    transcript: &ProtocolTranscript<T>,
    rho0: &DensityMatrix<T>,
    prefix: usize,
) -> Result<DofReport> {
    let model = ConstraintModel::new(transcript, prefix, false)?;
    let base = PauliVector::from_density(rho0)?;
    let c0: Vec<f64> = base.coeffs.iter().map(|&c| to_f64(c)).collect();
    let map = |c: &[f64]| -> Vec<f64> {
        let mut pv = PauliVector::<f64> { coeffs: [0.0; 15] };
        pv.coeffs.copy_from_slice(c);
        let rho = to_m4(&pv.to_matrix());
        model
            .simulate(&rho, false)
            .unwrap_or_else(|| vec![f64::NAN; 6 + 3 * model.prefix()])
    };
    let jac = numeric_jacobian(&map, &c0, 1e-6);
    if jac.iter().any(|v| !v.is_finite()) {
        return Err(Error::PostSelectionImpossible(0.0));
    }
    let svd = SVD::new(jac, false, false);
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let cutoff = RANK_TOL * singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values.iter().filter(|&&s| s > cutoff).count();
    Ok(DofReport {
        m: prefix,
        constraint_count: model.constraint_count(),
        rank,
        dof: 15 - rank.min(15),
        singular_values,
    })
}

/// Euclidean projection of `v` onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut shift = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            shift = t;
        }
    }
    v.iter().map(|&x| (x - shift).max(0.0)).collect()
}

/// Linear inversion of Pauli expectations followed by the nearest (Frobenius)
/// unit-trace positive semidefinite matrix.
pub fn linear_inversion_tomography<T: Real>(expectations: &PauliVector<T>) -> DensityMatrix<T> {
    let raw = expectations.to_matrix();
    let (values, vectors) = linalg::hermitian_eigen(&raw);
    let projected = project_simplex(&values.iter().map(|&v| to_f64(v)).collect::<Vec<_>>());
    let diag = CMatrix::<T>::from_fn(4, 4, |r, c| {
        if r == c {
            Complex::new(lit(projected[r]), T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let m = &vectors * diag * vectors.adjoint();
    DensityMatrix::from_unnormalized(linalg::hermitian_part(&m)).expect("simplex projection is a state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{bell_phi_plus, input_state};
    use crate::filter::protocol::run_protocol;
    use crate::random::random_density_matrix;

    #[test]
    fn truth_has_zero_residual() {
        for s in 0..5 {
            let rho = random_density_matrix::<f64>(4, 4, s).unwrap();
            let t = run_protocol(&rho, 5).unwrap();
            for prefix in 0..=5 {
                assert!(constraint_residual(&rho, &t, prefix).unwrap() <= 1e-12);
                assert!(constraint_residual_with_probs(&rho, &t, prefix).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn mixed_candidate_is_penalized() {
        let rho = input_state::<f64>(0.5).unwrap();
        let t = run_protocol(&rho, 5).unwrap();
        let mixed = DensityMatrix::<f64>::maximally_mixed(4);
        assert!(constraint_residual(&mixed, &t, 5).unwrap() > 1e-3);
        let model = ConstraintModel::new(&t, 0, false).unwrap();
        assert_eq!(model.constraint_count(), 6);
        assert_eq!(ConstraintModel::new(&t, 5, true).unwrap().constraint_count(), 26);
        assert!(ConstraintModel::new(&t, 6, false).is_err());
    }

    #[test]
    fn blocked_candidate_is_infeasible() {
        let rho = input_state::<f64>(0.5).unwrap();
        let mut t = run_protocol(&rho, 1).unwrap();
        // a projector onto |0> on A kills any candidate supported on |1>_A
        let mut k = CMatrix::<f64>::zeros(2, 2);
        k[(0, 0)] = Complex::new(1.0, 0.0);
        k[(1, 1)] = Complex::new(1e-9, 0.0);
        t.steps[0].filter = crate::filter::FilterOp::from_matrix(k).unwrap();
        let one_one = DensityMatrix::<f64>::from_pure(&crate::families::basis_ket(4, 3)).unwrap();
        assert_eq!(constraint_residual(&one_one, &t, 1).unwrap(), f64::INFINITY);
    }

    #[test]
    fn parametrization_gives_states() {
        let mut rng = rng_from_seed(2);
        for _ in 0..50 {
            let p: Vec<f64> = (0..PARAMS).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let m = params_to_state(&p).unwrap();
            let rho = DensityMatrix::<f64>::new(from_m4(&m)).unwrap();
            assert!(rho.eigenvalues()[0] >= -1e-14);
        }
    }

    #[test]
    fn mle_recovers_input() {
        let rho = input_state::<f64>(0.5).unwrap();
        let t = run_protocol(&rho, 5).unwrap();
        let fit = mle_reconstruct(&t).unwrap();
        assert!(fidelity(&fit.state, &rho).unwrap() > 0.999);
        assert_eq!(fit.identifiability, Identifiability::Unique);
        assert!(matches!(
            mle_reconstruct(&t.prefix(4).unwrap()),
            Err(Error::TranscriptTooShort { .. })
        ));
    }

    #[test]
    fn mixed_transcript_is_underdetermined() {
        let t = run_protocol(&DensityMatrix::<f64>::maximally_mixed(4), 5).unwrap();
        let fit = mle_reconstruct(&t).unwrap();
        assert_eq!(fit.identifiability, Identifiability::Underdetermined);
    }

    #[test]
    fn dof_ladder_on_input_state() {
        let rho = random_density_matrix::<f64>(4, 4, 77).unwrap();
        let t = run_protocol(&rho, 5).unwrap();
        let dofs: Vec<usize> = (0..=5).map(|m| dof_analysis(&t, &rho, m).unwrap().dof).collect();
        assert_eq!(dofs[0], 9);
        assert_eq!(dofs[1], 6);
        assert_eq!(dofs[5], 0);
        assert!(dofs.windows(2).all(|w| w[1] <= w[0]), "{dofs:?}");
    }

    #[test]
    fn linear_inversion_examples() {
        let zero = PauliVector::<f64> { coeffs: [0.0; 15] };
        let mixed = linear_inversion_tomography(&zero);
        assert!((mixed.matrix() - DensityMatrix::<f64>::maximally_mixed(4).matrix()).norm() < 1e-15);
        let bell = DensityMatrix::<f64>::from_pure(&bell_phi_plus()).unwrap();
        let pv = PauliVector::from_density(&bell).unwrap();
        assert!((linear_inversion_tomography(&pv).matrix() - bell.matrix()).norm() < 1e-12);
        let mut bumped = pv;
        bumped.coeffs[3] += 0.1;
        let fixed = linear_inversion_tomography(&bumped);
        assert!(fixed.eigenvalues()[0] >= -1e-14);
        assert!((fixed.matrix().trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.7, 0.5, -0.1, -0.1]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.4).abs() < 1e-15);
        assert_eq!(project_simplex(&[0.25; 4]), vec![0.25; 4]);
    }
}
