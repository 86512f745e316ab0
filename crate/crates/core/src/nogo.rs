//! Constructive no-go checks: for any 14 linearly independent observables
//! there is a separable and an entangled state with identical expectations.

use nalgebra::{DMatrix, SVD};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::entanglement::{classify_determinant, isotropic_state, ppt_determinant, singlet_fraction, Verdict, MARGIN_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Subsystem};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::random::{rng_from_seed, SeededRng};
use crate::scalar::{lit, to_f64, Real};
use crate::state::{expect_dim, DensityMatrix, MatrixJson, Observable, PauliVector};

/// Relative singular-value cutoff for the rank of an observable set.
pub const RANK_TOL: f64 = 1e-9;
/// Bell overlaps at or below this send the search to the local-conjugation phase.
pub const OVERLAP_TOL: f64 = 1e-6;
/// Isotropic weight of the starting separable state, just inside the boundary.
pub const BOUNDARY_ALPHA: f64 = 1.0 / 3.0 - 1e-6;
pub const SEP_DET_TOL: f64 = 1e-12;
pub const PROJECTION_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-12;
const CONJUGATION_STRENGTH: f64 = 0.5;
const CONJUGATION_ATTEMPTS: usize = 16;
const T_GRID: usize = 256;
const DEFAULT_SEED: u64 = 0x6e6f_676f;

/// Unit-norm traceless `R` orthogonal (Hilbert–Schmidt) to every observable.
pub fn normal_direction<T: Real>(observables: &[Observable<T>]) -> Result<Observable<T>> {
    let rows = observables.len().max(15);
    let mut a = DMatrix::<f64>::zeros(rows, 15);
    for (i, o) in observables.iter().enumerate() {
        expect_dim(4, o.dim())?;
        let pv = PauliVector::from_matrix(o.matrix());
        for k in 0..15 {
            a[(i, k)] = to_f64(pv.coeffs[k]);
        }
    }
    let svd = SVD::new(a, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| sigma_max > 0.0 && s > RANK_TOL * sigma_max)
        .count();
    match rank {
        15 => return Err(Error::InformationallyComplete { rank }),
        14 => {}
        _ => return Err(Error::RankDeficient { rank, required: 14 }),
    }
    let (null_row, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("15 singular values");
    let mut m = CMatrix::<T>::zeros(4, 4);
    for k in 0..15 {
        let (i, j) = PauliVector::<T>::label(k);
        // Each Pauli product has Hilbert–Schmidt norm 2.
        m += linalg::pauli_pair::<T>(i, j) * Complex::new(lit::<T>(v_t[(null_row, k)] * 0.5), T::zero());
    }
    Observable::new(m).map(|r| r.normalized())
}

/// `U = R_z(a) R_y(b) R_z(c)`.
fn euler_unitary<T: Real>(angles: &[f64]) -> CMatrix<T> {
    linalg::rotation::<T>(3, lit(angles[0])) * linalg::rotation::<T>(2, lit(angles[1])) * linalg::rotation::<T>(3, lit(angles[2]))
}

/// `<Ψ|R|Ψ>` for `|Ψ> = (U ⊗ I)|Φ>`.
pub fn bell_overlap<T: Real>(r: &CMatrix<T>, u: &CMatrix<T>) -> T {
    let s = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let psi: Vec<Complex<T>> = (0..4).map(|k| u[(k / 2, k % 2)] * Complex::new(s, T::zero())).collect();
    let mut acc = Complex::new(T::zero(), T::zero());
    for a in 0..4 {
        for b in 0..4 {
            acc += psi[a].conj() * r[(a, b)] * psi[b];
        }
    }
    acc.re
}

#[derive(Debug, Clone)]
pub struct OverlapResult<T: Real> {
    pub unitary: CMatrix<T>,
    /// `|<Ψ|R|Ψ>|` at the maximizer.
    pub value: T,
    /// Sign of `<Ψ|R|Ψ>` at the maximizer.
    pub sign: T,
}

/// Largest `|<Ψ|R|Ψ>|` over maximally entangled `|Ψ> = (U ⊗ I)|Φ>`.
pub fn max_entangled_overlap<T: Real>(r: &Observable<T>) -> Result<OverlapResult<T>> {
    expect_dim(4, r.dim())?;
    let objective = |x: &[f64]| -to_f64(bell_overlap(r.matrix(), &euler_unitary::<T>(x))).abs();
    let grid = 24;
    let tau = std::f64::consts::TAU;
    let mut best = (vec![0.0; 3], objective(&[0.0; 3]));
    for i in 0..grid {
        for j in 0..grid {
            for k in 0..grid {
                let x = [
                    tau * i as f64 / grid as f64,
                    std::f64::consts::PI * j as f64 / (grid - 1) as f64,
                    tau * k as f64 / grid as f64,
                ];
                let v = objective(&x);
                if v < best.1 {
                    best = (x.to_vec(), v);
                }
            }
        }
    }
    let polished = nelder_mead(
        objective,
        &best.0,
        NelderMeadOptions {
            initial_step: 0.1,
            max_evals: 4000,
            ..NelderMeadOptions::default()
        },
    );
    let x = if polished.value <= best.1 { polished.x } else { best.0 };
    let unitary = euler_unitary::<T>(&x);
    let signed = bell_overlap(r.matrix(), &unitary);
    Ok(OverlapResult {
        unitary,
        value: signed.abs(),
        sign: if signed < T::zero() { -T::one() } else { T::one() },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub det_sep: f64,
    pub det_ent: f64,
    /// Largest expectation difference on the measured observables (or, when
    /// none are given, the norm of the difference outside `span(R)`).
    pub projection_gap: f64,
    pub sep_verdict: Verdict,
    pub ent_verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchPhase {
    /// Direct step along `R` from a boundary isotropic state.
    BellAligned,
    /// Found after a local conjugation made `R` visible to Bell states.
    LocalConjugation,
}

#[derive(Debug, Clone)]
pub struct CounterexamplePair<T: Real> {
    pub r: Observable<T>,
    pub rho_sep: DensityMatrix<T>,
    pub t: T,
    pub rho_ent: DensityMatrix<T>,
    pub certificates: Certificates,
    pub phase: SearchPhase,
    /// Singlet fraction of the entangled member in the frame where the step was taken.
    pub witness: f64,
}

fn det_f64<T: Real>(rho: &DensityMatrix<T>) -> Result<f64> {
    Ok(to_f64(ppt_determinant(rho)?))
}

impl<T: Real> CounterexamplePair<T> {
    /// Rechecks every invariant of the pair; `observables` sharpens the
    /// projection gap to the measured set.
    pub fn certify(&self, observables: Option<&[Observable<T>]>) -> Result<Certificates> {
        let fail = |msg: String| Err(Error::CertificateFailure(msg));
        let tr = to_f64(self.r.trace());
        let norm = to_f64(self.r.hs_norm());
        if tr.abs() > UNIT_TOL || (norm - 1.0).abs() > UNIT_TOL {
            return fail(format!("R must be traceless with unit norm (tr {tr:e}, norm {norm})"));
        }
        if to_f64(self.t) == 0.0 {
            return fail("t = 0 gives identical states".into());
        }
        let diff = self.rho_ent.matrix() - self.rho_sep.matrix();
        let step = self.r.matrix() * Complex::new(self.t, T::zero());
        let mismatch = to_f64((&diff - &step).camax());
        if mismatch > UNIT_TOL {
            return fail(format!("rho_ent - rho_sep differs from t·R by {mismatch:e}"));
        }
        let det_sep = det_f64(&self.rho_sep)?;
        let det_ent = det_f64(&self.rho_ent)?;
        if det_sep < -SEP_DET_TOL {
            return fail(format!("separable member has det {det_sep:e}"));
        }
        if !(det_ent < -MARGIN_TOL) {
            return fail(format!("entangled member has det {det_ent:e}"));
        }
        let projection_gap = match observables {
            Some(obs) => {
                let mut gap: f64 = 0.0;
                for o in obs {
                    let a = self.rho_sep.expectation(o)?;
                    let b = self.rho_ent.expectation(o)?;
                    gap = gap.max(to_f64((a - b).abs()));
                }
                gap
            }
            None => {
                let along = linalg::hs_inner(self.r.matrix(), &diff).re;
                to_f64(linalg::hs_norm(&(&diff - self.r.matrix() * Complex::new(along, T::zero()))))
            }
        };
        if projection_gap > PROJECTION_TOL {
            return fail(format!("projection gap {projection_gap:e}"));
        }
        Ok(Certificates {
            det_sep,
            det_ent,
            projection_gap,
            sep_verdict: classify_determinant(det_sep),
            ent_verdict: classify_determinant(det_ent),
        })
    }

    pub fn to_json(&self) -> CounterexampleJson {
        CounterexampleJson {
            r: self.r.to_json(),
            rho_sep: self.rho_sep.to_json(),
            t: to_f64(self.t),
            rho_ent: self.rho_ent.to_json(),
            certificates: self.certificates,
            phase: self.phase,
            witness: self.witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleJson {
    #[serde(rename = "R")]
    pub r: MatrixJson,
    pub rho_sep: MatrixJson,
    pub t: f64,
    pub rho_ent: MatrixJson,
    pub certificates: Certificates,
    pub phase: SearchPhase,
    pub witness: f64,
}

/// Largest `t ≥ 0` (up to `cap`) keeping `base + t·dir` positive semidefinite.
fn psd_range<T: Real>(base: &CMatrix<T>, dir: &CMatrix<T>, cap: f64) -> f64 {
    let min_eig = |t: f64| to_f64(linalg::hermitian_eigenvalues(&(base + dir * Complex::new(lit::<T>(t), T::zero())))[0]);
    if min_eig(cap) >= 0.0 {
        return cap;
    }
    let (mut lo, mut hi) = (0.0, cap);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if min_eig(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

struct Step<T: Real> {
    rho_sep: DensityMatrix<T>,
    t: f64,
    witness: f64,
}

/// Phase 1: start at the separable edge of the isotropic family aligned with
/// the best Bell state and move along `±R` to the most negative determinant.
fn bell_aligned_step<T: Real>(r: &Observable<T>) -> Result<Step<T>> {
    let overlap = max_entangled_overlap(r)?;
    if to_f64(overlap.value) <= OVERLAP_TOL {
        return Err(Error::SearchExhausted(format!(
            "Bell overlap {:e} too small for a direct step",
            to_f64(overlap.value)
        )));
    }
    let u = &overlap.unitary;
    let local = linalg::kron(u, &linalg::identity::<T>(2));
    let rho_sep = isotropic_state::<T>(BOUNDARY_ALPHA)?.conjugate(&local)?;
    let sign = to_f64(overlap.sign);
    let dir = r.matrix() * Complex::new(overlap.sign, T::zero());
    let t_max = psd_range(rho_sep.matrix(), &dir, 1.0);
    let det_at = |t: f64| {
        let m = rho_sep.matrix() + &dir * Complex::new(lit::<T>(t), T::zero());
        to_f64(Observable::new(linalg::hermitian_part(&m)).and_then(|o| o.partial_transpose(Subsystem::A)).map(|o| o.determinant()).unwrap_or(T::zero()))
    };
    let mut best = (0.0, det_at(0.0));
    for i in 1..=T_GRID {
        let t = t_max * i as f64 / T_GRID as f64;
        let d = det_at(t);
        if d < best.1 {
            best = (t, d);
        }
    }
    if !(best.1 < -MARGIN_TOL) {
        return Err(Error::SearchExhausted(format!(
            "bell-aligned phase: best det {:e} over t in [0, {t_max:e}] (overlap {:e})",
            best.1,
            to_f64(overlap.value)
        )));
    }
    let t = sign * best.0;
    let ent = DensityMatrix::new(linalg::hermitian_part(&(rho_sep.matrix() + r.matrix() * Complex::new(lit::<T>(t), T::zero()))))?;
    let witness = to_f64(singlet_fraction(&ent, u)?);
    Ok(Step { rho_sep, t, witness })
}

fn sqrt_filter<T: Real>(bloch: [f64; 3], kappa: f64) -> CMatrix<T> {
    let mut m = linalg::identity::<T>(2);
    for (i, b) in bloch.iter().enumerate() {
        m += linalg::pauli::<T>(i + 1) * Complex::new(lit::<T>(kappa * b), T::zero());
    }
    linalg::sqrt_psd(&m)
}

/// Unit vector orthogonal to `n` (random when `n` vanishes).
fn orthogonal_unit(n: [f64; 3], rng: &mut SeededRng) -> [f64; 3] {
    loop {
        let g: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let nn: f64 = n.iter().map(|x| x * x).sum();
        let proj = if nn > 1e-30 { g.iter().zip(&n).map(|(a, b)| a * b).sum::<f64>() / nn } else { 0.0 };
        let v = [g[0] - proj * n[0], g[1] - proj * n[1], g[2] - proj * n[2]];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

fn assemble<T: Real>(
    r: &Observable<T>,
    rho_sep: DensityMatrix<T>,
    t: f64,
    phase: SearchPhase,
    witness: f64,
) -> Result<CounterexamplePair<T>> {
    let t_t: T = lit(t);
    let rho_ent = DensityMatrix::new(rho_sep.matrix() + r.matrix() * Complex::new(t_t, T::zero()))?;
    let mut pair = CounterexamplePair {
        r: r.clone(),
        rho_sep,
        t: t_t,
        rho_ent,
        certificates: Certificates {
            det_sep: 0.0,
            det_ent: 0.0,
            projection_gap: 0.0,
            sep_verdict: Verdict::Boundary,
            ent_verdict: Verdict::Boundary,
        },
        phase,
        witness,
    };
    pair.certificates = pair.certify(None)?;
    Ok(pair)
}

/// Separable/entangled pair differing only along `R`.
pub fn find_counterexample<T: Real>(r: &Observable<T>) -> Result<CounterexamplePair<T>> {
    find_counterexample_seeded(r, DEFAULT_SEED)
}

pub fn find_counterexample_seeded<T: Real>(r: &Observable<T>, seed: u64) -> Result<CounterexamplePair<T>> {
    expect_dim(4, r.dim())?;
    let norm = to_f64(r.hs_norm());
    if !(norm > 0.0) {
        return Err(Error::out_of_range("‖R‖", norm, f64::MIN_POSITIVE, f64::INFINITY));
    }
    let r = r.traceless_part().normalized();

    let phase1 = bell_aligned_step(&r);
    if let Ok(step) = &phase1 {
        if let Ok(pair) = assemble(&r, step.rho_sep.clone(), step.t, SearchPhase::BellAligned, step.witness) {
            return Ok(pair);
        }
    }

    // R ≈ I⊗M + N⊗I: conjugate by S = sqrt(I + κ v·σ) ⊗ sqrt(I + κ u·σ) with
    // v ⊥ N and u ⊥ M so that S R S† stays traceless but gains correlations.
    let n_part = linalg::partial_trace(r.matrix(), 2, 2, Subsystem::A);
    let m_part = linalg::partial_trace(r.matrix(), 2, 2, Subsystem::B);
    let n_vec = pauli_components(&n_part);
    let m_vec = pauli_components(&m_part);
    let mut rng = rng_from_seed(seed);
    let mut diagnostics = vec![match &phase1 {
        Ok(_) => "phase 1 step failed certification".to_string(),
        Err(e) => format!("phase 1: {e}"),
    }];
    for attempt in 0..CONJUGATION_ATTEMPTS {
        let v = orthogonal_unit(n_vec, &mut rng);
        let u = orthogonal_unit(m_vec, &mut rng);
        let s = linalg::kron(&sqrt_filter::<T>(v, CONJUGATION_STRENGTH), &sqrt_filter::<T>(u, CONJUGATION_STRENGTH));
        let raw = Observable::new(linalg::hermitian_part(&(&s * r.matrix() * s.adjoint())))?;
        let raw_norm = to_f64(raw.hs_norm());
        let r_conj = raw.traceless_part().normalized();
        let step = match bell_aligned_step(&r_conj) {
            Ok(step) => step,
            Err(e) => {
                diagnostics.push(format!("attempt {attempt}: {e}"));
                continue;
            }
        };
        let s_inv = s.clone().try_inverse().ok_or_else(|| Error::CertificateFailure("singular conjugation".into()))?;
        let back = &s_inv * step.rho_sep.matrix() * s_inv.adjoint();
        let c = to_f64(linalg::trace(&back).re);
        let rho_sep = DensityMatrix::new(linalg::hermitian_part(&(back / Complex::new(lit::<T>(c), T::zero()))))?;
        let t = step.t / (raw_norm * c);
        match assemble(&r, rho_sep, t, SearchPhase::LocalConjugation, step.witness) {
            Ok(pair) => return Ok(pair),
            Err(e) => diagnostics.push(format!("attempt {attempt}: {e}")),
        }
    }
    Err(Error::SearchExhausted(diagnostics.join("; ")))
}

/// `[tr(Xm), tr(Ym), tr(Zm)]`.
fn pauli_components<T: Real>(m: &CMatrix<T>) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = to_f64(linalg::trace_of_product(&linalg::pauli::<T>(i + 1), m).re);
    }
    out
}

/// Normal direction of the measured set, then a pair it cannot tell apart.
pub fn cylinder_test<T: Real>(observables: &[Observable<T>]) -> Result<CounterexamplePair<T>> {
    let r = normal_direction(observables)?;
    let mut pair = find_counterexample(&r)?;
    pair.certificates = pair.certify(Some(observables))?;
    Ok(pair)
}

/// The 15 two-qubit Pauli products with the listed `(i, j)` labels removed.
pub fn pauli_set_without<T: Real>(omit: &[(usize, usize)]) -> Vec<Observable<T>> {
    (0..15)
        .map(PauliVector::<T>::label)
        .filter(|l| !omit.contains(l))
        .map(|(i, j)| Observable::pauli_pair(i, j))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetProbe {
    pub t_star: f64,
    /// `det((I/4 + t*·R)^{T_A}) − 1/256`.
    pub dev: f64,
}

/// Scans `det((I/4 + tR)^{T_A}) − 1/256` over `t_grid` and returns the
/// largest deviation in absolute value.
pub fn det_constancy_probe<T: Real>(r: &Observable<T>, t_grid: &[f64]) -> Result<DetProbe> {
    expect_dim(4, r.dim())?;
    let pt = r.partial_transpose(Subsystem::A)?;
    let quarter = linalg::identity::<T>(4) * Complex::new(lit::<T>(0.25), T::zero());
    let mut best = DetProbe { t_star: 0.0, dev: 0.0 };
    for &t in t_grid {
        let m = &quarter + pt.matrix() * Complex::new(lit::<T>(t), T::zero());
        let dev = to_f64(m.determinant().re) - 1.0 / 256.0;
        if dev.abs() > best.dev.abs() || (best.t_star == 0.0 && best.dev == 0.0) {
            best = DetProbe { t_star: t, dev };
        }
    }
    Ok(best)
}

/// `±{0.01, 0.02, …, 0.1}`.
pub fn default_probe_grid() -> Vec<f64> {
    (1..=10).flat_map(|k| [0.01 * k as f64, -0.01 * k as f64]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_traceless_hermitian;

    #[test]
    fn normal_direction_of_pauli_complements() {
        for omit in [(3, 3), (1, 0), (1, 2)] {
            let r = normal_direction(&pauli_set_without::<f64>(&[omit])).unwrap();
            let expected = Observable::<f64>::pauli_pair(omit.0, omit.1).normalized();
            let ip = r.hs_inner(&expected);
            assert!((ip.abs() - 1.0).abs() < 1e-12, "{omit:?}: {ip}");
        }
    }

    #[test]
    fn normal_direction_errors() {
        assert!(matches!(
            normal_direction(&pauli_set_without::<f64>(&[])),
            Err(Error::InformationallyComplete { rank: 15 })
        ));
        let mut short = pauli_set_without::<f64>(&[(3, 3)]);
        short[1] = short[0].clone();
        assert!(matches!(normal_direction(&short), Err(Error::RankDeficient { rank: 13, required: 14 })));
    }

    #[test]
    fn normal_direction_of_random_set() {
        let mut rng = rng_from_seed(5);
        let obs: Vec<_> = (0..14).map(|_| random_traceless_hermitian::<f64, _>(&mut rng, 4)).collect();
        let r = normal_direction(&obs).unwrap();
        assert!(r.trace().abs() < 1e-12);
        assert!((r.hs_norm() - 1.0).abs() < 1e-12);
        for o in &obs {
            assert!(r.hs_inner(o).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_examples() {
        let zz = Observable::<f64>::pauli_pair(3, 3).scale(0.5);
        assert!(max_entangled_overlap(&zz).unwrap().value >= 0.5 - 1e-12);
        let iz = Observable::<f64>::pauli_pair(0, 3).scale(1.0 / 8f64.sqrt());
        assert!(max_entangled_overlap(&iz).unwrap().value < 1e-12);
    }

    #[test]
    fn phase_one_on_isotropic_direction() {
        let bell = DensityMatrix::<f64>::from_pure(&crate::families::bell_phi_plus()).unwrap();
        let r = Observable::new(bell.matrix() - linalg::identity::<f64>(4) * Complex::new(0.25, 0.0)).unwrap();
        let pair = find_counterexample(&r).unwrap();
        assert_eq!(pair.phase, SearchPhase::BellAligned);
        assert_eq!(pair.certificates.ent_verdict, Verdict::Entangled);
        assert!(pair.certificates.det_sep >= -SEP_DET_TOL);
        assert!(pair.witness > 0.5);
    }

    #[test]
    fn phase_two_on_local_direction() {
        let r = Observable::<f64>::pauli_pair(1, 0).scale(1.0 / 8f64.sqrt());
        let pair = find_counterexample(&r).unwrap();
        assert_eq!(pair.phase, SearchPhase::LocalConjugation);
        assert!(pair.certificates.det_ent < -MARGIN_TOL);
        let mixed = Observable::new(linalg::pauli_pair::<f64>(0, 2) + linalg::pauli_pair::<f64>(3, 0) * Complex::new(0.3, 0.0)).unwrap();
        find_counterexample(&mixed).unwrap();
    }

    #[test]
    fn zero_step_is_rejected() {
        let r = Observable::<f64>::pauli_pair(3, 3).normalized();
        let mut pair = find_counterexample(&r).unwrap();
        pair.t = 0.0;
        pair.rho_ent = pair.rho_sep.clone();
        assert!(matches!(pair.certify(None), Err(Error::CertificateFailure(_))));
        assert!(find_counterexample(&Observable::<f64>::zeros(4)).is_err());
    }

    #[test]
    fn cylinder_pairs_match_on_measured_set() {
        for omit in [(3, 3), (1, 2)] {
            let obs = pauli_set_without::<f64>(&[omit]);
            let pair = cylinder_test(&obs).unwrap();
            assert!(pair.certificates.projection_gap <= PROJECTION_TOL);
            assert_ne!(pair.certificates.sep_verdict, Verdict::Entangled);
            assert_eq!(pair.certificates.ent_verdict, Verdict::Entangled);
        }
        assert!(cylinder_test(&pauli_set_without::<f64>(&[])).is_err());
    }

    #[test]
    fn det_probe_examples() {
        let zero = det_constancy_probe(&Observable::<f64>::zeros(4), &default_probe_grid()).unwrap();
        assert_eq!(zero.dev, 0.0);
        let zz = Observable::<f64>::pauli_pair(3, 3).scale(0.5);
        let p = det_constancy_probe(&zz, &[0.1]).unwrap();
        assert!((p.dev - (0.96f64.powi(2) - 1.0) / 256.0).abs() < 1e-15);
    }

    #[test]
    fn pair_json_has_all_fields() {
        let pair = find_counterexample(&Observable::<f64>::pauli_pair(3, 3).normalized()).unwrap();
        let v = serde_json::to_value(pair.to_json()).unwrap();
        for key in ["R", "rho_sep", "t", "rho_ent", "certificates"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
