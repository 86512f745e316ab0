//! k-symmetric extendibility: the Werner-state threshold, the closed-form
//! two-extendibility test for X states, and the construction showing the
//! k-extendible set is not cylinder-like.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entanglement::ppt_determinant;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Subsystem};
use crate::random::haar_unitary;
use crate::scalar::{lit, to_f64, Real};
use crate::state::{DensityMatrix, Observable};

/// Slack on the Werner threshold comparison so the boundary itself counts as extendible.
const THRESHOLD_SLACK: f64 = 1e-12;

/// `(1 + ψ)/2 · ρ⁺ + (1 − ψ)/2 · ρ⁻` on `C^d ⊗ C^d`, where `ρ±` are the
/// normalized projectors onto the symmetric and antisymmetric subspaces.
///
/// `psi_minus` equals the expectation of the swap operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerState {
    pub psi_minus: f64,
    pub d: usize,
}

impl WernerState {
    pub fn new(psi_minus: f64, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::out_of_range("d", d as f64, 2.0, f64::INFINITY));
        }
        if !(-1.0..=1.0).contains(&psi_minus) {
            return Err(Error::out_of_range("psi_minus", psi_minus, -1.0, 1.0));
        }
        Ok(WernerState { psi_minus, d })
    }

    /// Symmetric (`P⁺`) and antisymmetric (`P⁻`) projectors.
    pub fn projectors<T: Real>(d: usize) -> (CMatrix<T>, CMatrix<T>) {
        let id = linalg::identity::<T>(d * d);
        let swap = linalg::swap_operator::<T>(d);
        let half = Complex::new(lit::<T>(0.5), T::zero());
        ((&id + &swap) * half, (id - swap) * half)
    }

    pub fn materialize<T: Real>(&self) -> DensityMatrix<T> {
        let d = self.d as f64;
        let (p_sym, p_anti) = Self::projectors::<T>(self.d);
        let w_sym = (1.0 + self.psi_minus) / 2.0 / (d * (d + 1.0) / 2.0);
        let w_anti = (1.0 - self.psi_minus) / 2.0 / (d * (d - 1.0) / 2.0);
        let m = p_sym * Complex::new(lit::<T>(w_sym), T::zero()) + p_anti * Complex::new(lit::<T>(w_anti), T::zero());
        DensityMatrix::new(m).expect("Werner state is a valid state")
    }

    /// Exact `U⊗U` twirl of `sigma`: the Werner state with the same swap expectation.
    pub fn twirl_of<T: Real>(sigma: &DensityMatrix<T>, d: usize) -> Result<Self> {
        crate::state::expect_dim(d * d, sigma.dim())?;
        let swap = linalg::swap_operator::<T>(d);
        let psi = to_f64(linalg::trace_of_product(&swap, sigma.matrix()).re);
        WernerState::new(psi.clamp(-1.0, 1.0), d)
    }
}

/// Empirical `U⊗U` twirl over `samples` Haar-random unitaries.
pub fn twirl_monte_carlo<T: Real, R: Rng + ?Sized>(
    sigma: &DensityMatrix<T>,
    d: usize,
    samples: usize,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    crate::state::expect_dim(d * d, sigma.dim())?;
    let mut acc = CMatrix::<T>::zeros(d * d, d * d);
    for _ in 0..samples {
        let u = haar_unitary::<T, R>(rng, d);
        let uu = linalg::kron(&u, &u);
        acc += &uu * sigma.matrix() * uu.adjoint();
    }
    DensityMatrix::from_unnormalized(acc)
}

/// Werner states are k-symmetric extendible iff `ψ⁻ ≥ −(d − 1)/k`.
pub fn werner_k_extendable(psi_minus: f64, d: usize, k: usize) -> Result<bool> {
    if d < 2 {
        return Err(Error::out_of_range("d", d as f64, 2.0, f64::INFINITY));
    }
    if k < 1 {
        return Err(Error::out_of_range("k", k as f64, 1.0, f64::INFINITY));
    }
    let threshold = -((d - 1) as f64) / k as f64;
    Ok(psi_minus >= threshold - THRESHOLD_SLACK)
}

/// Unnormalized diagonal weights of the two-qubit X state
/// `diag(x, y, z, w)` with couplings `sqrt(xw)` on the anti-diagonal corners
/// and `sqrt(yz)` in the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl XStateParams {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("x", self.x), ("y", self.y), ("z", self.z), ("w", self.w)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::out_of_range(name, v, 0.0, f64::INFINITY));
            }
        }
        if self.x + self.y + self.z + self.w <= 0.0 {
            return Err(Error::InvalidTrace(0.0));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.x + self.y + self.z + self.w
    }

    pub fn unnormalized<T: Real>(&self) -> CMatrix<T> {
        let mut m = CMatrix::<T>::zeros(4, 4);
        let c = |v: f64| Complex::new(lit::<T>(v), T::zero());
        m[(0, 0)] = c(self.x);
        m[(1, 1)] = c(self.y);
        m[(2, 2)] = c(self.z);
        m[(3, 3)] = c(self.w);
        let xw = (self.x * self.w).sqrt();
        let yz = (self.y * self.z).sqrt();
        m[(0, 3)] = c(xw);
        m[(3, 0)] = c(xw);
        m[(1, 2)] = c(yz);
        m[(2, 1)] = c(yz);
        m
    }

    pub fn materialize<T: Real>(&self) -> Result<DensityMatrix<T>> {
        self.validate()?;
        DensityMatrix::from_unnormalized(self.unnormalized())
    }

    /// `(x − y)(w − z)`; positive exactly when the state has no 2-symmetric extension.
    pub fn extension_obstruction(&self) -> f64 {
        (self.x - self.y) * (self.w - self.z)
    }
}

pub fn xstate_not_two_extendable(p: &XStateParams) -> Result<bool> {
    p.validate()?;
    Ok(p.extension_obstruction() > 0.0)
}

/// One checked inequality `lhs ≥ rhs` (or `>` when strict).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
}

impl InequalityCheck {
    pub fn holds(&self) -> bool {
        if self.strict {
            self.lhs > self.rhs
        } else {
            self.lhs >= self.rhs
        }
    }
}

/// A state with no 2-symmetric extension whose shift along `Z⊗I` is separable.
#[derive(Debug, Clone)]
pub struct ExtensionCounterexample<T: Real> {
    pub params: XStateParams,
    pub rho: DensityMatrix<T>,
    pub rho_shifted: DensityMatrix<T>,
    /// Unnormalized direction `Z⊗I = diag(1, 1, −1, −1)`.
    pub direction: Observable<T>,
    pub inequalities: Vec<InequalityCheck>,
    pub shifted_ppt_determinant: T,
    pub shifted_ppt_min_eigenvalue: T,
}

/// The family `x = y + ε`, `z = y + 2`, `w = y + 2 + ε`.
pub fn counterexample_params(y: f64, epsilon: f64) -> XStateParams {
    XStateParams {
        x: y + epsilon,
        y,
        z: y + 2.0,
        w: y + 2.0 + epsilon,
    }
}

/// Inequalities the construction relies on, evaluated for `p`.
pub fn counterexample_inequalities(p: &XStateParams) -> Vec<InequalityCheck> {
    let XStateParams { x, y, z, w } = *p;
    let check = |name, lhs, rhs, strict| InequalityCheck { name, lhs, rhs, strict };
    vec![
        check("(x-y)(w-z) > 0", (x - y) * (w - z), 0.0, true),
        check("(x+1)(w-1) >= xw", (x + 1.0) * (w - 1.0), x * w, false),
        check("xw >= yz", x * w, y * z, false),
        check("(y+1)(z-1) >= xw", (y + 1.0) * (z - 1.0), x * w, false),
        check("(y+1)(z-1) >= yz", (y + 1.0) * (z - 1.0), y * z, false),
        check("(x+1)(w-1) >= yz", (x + 1.0) * (w - 1.0), y * z, false),
    ]
}

pub fn build_extension_counterexample<T: Real>(y: f64, epsilon: f64) -> Result<ExtensionCounterexample<T>> {
    if !(y > 0.0) {
        return Err(Error::out_of_range("y", y, 0.0, f64::INFINITY));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::out_of_range("epsilon", epsilon, 0.0, f64::INFINITY));
    }
    let params = counterexample_params(y, epsilon);
    let inequalities = counterexample_inequalities(&params);
    if let Some(bad) = inequalities.iter().find(|c| !c.holds()) {
        return Err(Error::InequalityViolated {
            which: bad.name,
            lhs: bad.lhs,
            rhs: bad.rhs,
        });
    }

    let direction = Observable::<T>::pauli_pair(3, 0);
    let total = Complex::new(lit::<T>(params.total()), T::zero());
    let unnorm = params.unnormalized::<T>();
    // tr(Z⊗I) = 0, so both matrices share the normalization.
    let rho = DensityMatrix::new(&unnorm / total)?;
    let rho_shifted = DensityMatrix::new((unnorm + direction.matrix()) / total)?;

    let det = ppt_determinant(&rho_shifted)?;
    let min_pt = rho_shifted.partial_transpose(Subsystem::A)?.eigenvalues()[0];
    if to_f64(det) < -1e-12 || to_f64(min_pt) < -1e-12 {
        return Err(Error::CertificateFailure(format!(
            "shifted state is not PPT: det {:e}, min eigenvalue {:e}",
            to_f64(det),
            to_f64(min_pt)
        )));
    }
    Ok(ExtensionCounterexample {
        params,
        rho,
        rho_shifted,
        direction,
        inequalities,
        shifted_ppt_determinant: det,
        shifted_ppt_min_eigenvalue: min_pt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::trace_distance;
    use crate::random::{random_density_matrix_with, rng_from_seed};

    #[test]
    fn werner_thresholds() {
        assert!(werner_k_extendable(-0.5, 2, 2).unwrap());
        assert!(!werner_k_extendable(-0.51, 2, 2).unwrap());
        assert!(werner_k_extendable(-1.0, 2, 1).unwrap());
        assert!(werner_k_extendable(-1.0 / 3.0, 2, 3).unwrap());
        assert!(!werner_k_extendable(-1.0 / 3.0 - 1e-6, 2, 3).unwrap());
        assert!(werner_k_extendable(-1.0, 3, 2).unwrap());
        assert!(werner_k_extendable(0.0, 1, 2).is_err());
    }

    #[test]
    fn werner_matches_swap_expectation_and_is_uu_invariant() {
        let mut rng = rng_from_seed(3);
        for d in [2, 3] {
            for psi in [-1.0, -0.4, 0.2, 1.0] {
                let w = WernerState::new(psi, d).unwrap();
                let rho = w.materialize::<f64>();
                assert!((WernerState::twirl_of(&rho, d).unwrap().psi_minus - psi).abs() < 1e-12);
                let u = haar_unitary::<f64, _>(&mut rng, d);
                let uu = linalg::kron(&u, &u);
                let rotated = rho.conjugate(&uu).unwrap();
                assert!((rotated.matrix() - rho.matrix()).norm() < 1e-10);
            }
        }
    }

    // 200 i.i.d. Haar draws leave a median trace-norm error near 0.05, so the
    // 0.02 tolerance is checked at a sample count where it is attainable.
    #[test]
    fn twirl_fixed_point() {
        let mut rng = rng_from_seed(17);
        for _ in 0..5 {
            let sigma = random_density_matrix_with::<f64, _>(&mut rng, 4, 4).unwrap();
            let exact = WernerState::twirl_of(&sigma, 2).unwrap().materialize::<f64>();
            let mc = twirl_monte_carlo(&sigma, 2, 8000, &mut rng).unwrap();
            let td = 2.0 * trace_distance(&mc, &exact).unwrap();
            assert!(td < 0.02, "trace norm {td}");
            // twirling the projection again is a fixed point
            let again = WernerState::twirl_of(&exact, 2).unwrap().materialize::<f64>();
            assert!((again.matrix() - exact.matrix()).norm() < 1e-10);
        }
    }

    #[test]
    fn xstate_condition() {
        let p = |x, y, z, w| XStateParams { x, y, z, w };
        assert!(!xstate_not_two_extendable(&p(1.0, 1.0, 3.0, 5.0)).unwrap());
        assert!(!xstate_not_two_extendable(&p(1.0, 2.0, 1.0, 2.0)).unwrap());
        let fam = counterexample_params(1.0, 0.01);
        assert!(xstate_not_two_extendable(&fam).unwrap());
        assert!((fam.extension_obstruction() - 1e-4).abs() < 1e-15);
        assert!(xstate_not_two_extendable(&p(-1.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn xstate_is_psd_for_positive_weights() {
        let mut rng = rng_from_seed(8);
        for _ in 0..200 {
            let p = XStateParams {
                x: rng.random::<f64>() + 1e-3,
                y: rng.random::<f64>() + 1e-3,
                z: rng.random::<f64>() + 1e-3,
                w: rng.random::<f64>() + 1e-3,
            };
            let rho = p.materialize::<f64>().unwrap();
            assert!(rho.eigenvalues()[0] >= -1e-14);
        }
    }

    #[test]
    fn appendix_pair_inequalities() {
        let ineq = counterexample_inequalities(&counterexample_params(1.0, 0.01));
        let get = |name: &str| ineq.iter().find(|c| c.name == name).unwrap();
        assert!((get("(x+1)(w-1) >= xw").lhs - 4.0401).abs() < 1e-12);
        assert!((get("(x+1)(w-1) >= xw").rhs - 3.0401).abs() < 1e-12);
        assert!((get("xw >= yz").rhs - 3.0).abs() < 1e-12);
        assert!((get("(y+1)(z-1) >= xw").lhs - 4.0).abs() < 1e-12);
        assert!(ineq.iter().all(|c| c.holds()));
    }

    #[test]
    fn builder_certificates_on_grid() {
        for y in [0.5, 1.0, 2.0] {
            for eps in [0.001, 0.01, 0.1] {
                let ce = build_extension_counterexample::<f64>(y, eps).unwrap();
                assert!(xstate_not_two_extendable(&ce.params).unwrap());
                assert!(ce.shifted_ppt_determinant >= 0.0);
                assert!(ce.shifted_ppt_min_eigenvalue >= -1e-12);
                // difference is along Z⊗I only
                let diff = ce.rho_shifted.matrix() - ce.rho.matrix();
                let expected = ce.direction.matrix() / Complex::new(ce.params.total(), 0.0);
                assert!((diff - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_epsilon_rejected() {
        match build_extension_counterexample::<f64>(1.0, 0.0) {
            Err(Error::InequalityViolated { which, .. }) => assert_eq!(which, "(x-y)(w-z) > 0"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            build_extension_counterexample::<f64>(10.0, 0.1),
            Err(Error::InequalityViolated { which: "(y+1)(z-1) >= xw", .. })
        ));
    }

    #[test]
    fn shared_expectations_off_the_direction() {
        let ce = build_extension_counterexample::<f64>(1.0, 0.01).unwrap();
        for k in 0..15 {
            let (i, j) = crate::state::PauliVector::<f64>::label(k);
            if (i, j) == (3, 0) {
                continue;
            }
            let o = Observable::<f64>::pauli_pair(i, j);
            let a = ce.rho.expectation(&o).unwrap();
            let b = ce.rho_shifted.expectation(&o).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }
}
