//! Two-qubit entanglement: concurrence, the partial-transpose determinant,
//! isotropic states and the singlet-fraction witness.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::bell_phi_plus;
use crate::linalg::{self, CMatrix, Subsystem};
use crate::scalar::{lit, to_f64, Real};
use crate::state::{expect_dim, DensityMatrix};

/// Determinants closer to zero than this are reported as [`Verdict::Boundary`].
pub const MARGIN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceResult<T: Real> {
    pub value: T,
    /// Square roots of the eigenvalues of `ρ ρ̃`, decreasing.
    pub spectrum: [T; 4],
}

impl<T: Real> ConcurrenceResult<T> {
    fn from_spectrum(mut spectrum: [T; 4]) -> Self {
        spectrum.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let value = (spectrum[0] - spectrum[1] - spectrum[2] - spectrum[3]).max(T::zero());
        ConcurrenceResult { value, spectrum }
    }
}

/// Spin-flipped state `(σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flip<T: Real>(rho: &CMatrix<T>) -> CMatrix<T> {
    let yy = linalg::pauli_pair::<T>(2, 2);
    &yy * rho.conjugate() * &yy
}

/// Concurrence from the eigenvalues of the non-Hermitian product `ρ ρ̃`.
pub fn concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<ConcurrenceResult<T>> {
    expect_dim(4, rho.dim())?;
    let product = rho.matrix() * spin_flip(rho.matrix());
    let eig = product
        .clone()
        .eigenvalues()
        .or_else(|| product.schur().eigenvalues())
        .ok_or_else(|| Error::Format("Schur decomposition did not converge".into()))?;
    let re: Vec<T> = eig.iter().map(|e| e.re).collect();
    let mut spectrum = [T::zero(); 4];
    spectrum.copy_from_slice(&linalg::sqrt_spectrum(&re));
    Ok(ConcurrenceResult::from_spectrum(spectrum))
}

/// Concurrence from the Hermitian form `sqrt(sqrt(ρ) ρ̃ sqrt(ρ))`.
///
/// Same quantity as [`concurrence`] by a different route; kept for cross-validation.
pub fn concurrence_r_matrix<T: Real>(rho: &DensityMatrix<T>) -> Result<ConcurrenceResult<T>> {
    expect_dim(4, rho.dim())?;
    let s = linalg::sqrt_psd(rho.matrix());
    let inner = &s * spin_flip(rho.matrix()) * &s;
    let values = linalg::hermitian_eigenvalues(&inner);
    let mut spectrum = [T::zero(); 4];
    spectrum.copy_from_slice(&linalg::sqrt_spectrum(&values));
    Ok(ConcurrenceResult::from_spectrum(spectrum))
}

/// `det(ρ^{T_A})`; negative exactly when a two-qubit state is entangled.
pub fn ppt_determinant<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    Ok(rho.partial_transpose(Subsystem::A)?.determinant())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Entangled,
    Separable,
    /// `|det(ρ^{T_A})| < MARGIN_TOL`: numerically on the separable boundary.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementVerdict<T: Real> {
    pub verdict: Verdict,
    /// The partial-transpose determinant the verdict was read from.
    pub margin: T,
}

impl<T: Real> EntanglementVerdict<T> {
    pub fn is_entangled(&self) -> bool {
        self.verdict == Verdict::Entangled
    }
}

pub fn classify_determinant(det: f64) -> Verdict {
    if det < -MARGIN_TOL {
        Verdict::Entangled
    } else if det > MARGIN_TOL {
        Verdict::Separable
    } else {
        Verdict::Boundary
    }
}

pub fn is_entangled<T: Real>(rho: &DensityMatrix<T>) -> Result<EntanglementVerdict<T>> {
    let det = ppt_determinant(rho)?;
    Ok(EntanglementVerdict {
        verdict: classify_determinant(to_f64(det)),
        margin: det,
    })
}

/// `(1 − α) I/4 + α |Φ><Φ|`, valid for `α ∈ [−1/3, 1]`.
///
/// Entangled for `α > 1/3`, separable for `α ≤ 1/3`.
pub fn isotropic_state<T: Real>(alpha: f64) -> Result<DensityMatrix<T>> {
    if !(-1.0 / 3.0..=1.0).contains(&alpha) {
        return Err(Error::out_of_range("alpha", alpha, -1.0 / 3.0, 1.0));
    }
    let bell = linalg::projector(&bell_phi_plus::<T>());
    let mixed = linalg::identity::<T>(4) * Complex::new(lit::<T>((1.0 - alpha) / 4.0), T::zero());
    DensityMatrix::new(mixed + bell * Complex::new(lit::<T>(alpha), T::zero()))
}

/// `(U ⊗ I)|Φ>`.
pub fn rotated_bell<T: Real>(u: &CMatrix<T>) -> Vec<Complex<T>> {
    let phi = nalgebra::DVector::from_vec(bell_phi_plus::<T>());
    let full = linalg::kron(u, &linalg::identity::<T>(2));
    (full * phi).iter().copied().collect()
}

/// Overlap `<Ψ|ρ|Ψ>` with `|Ψ> = (U ⊗ I)|Φ>`; at most 1/2 on separable states.
pub fn singlet_fraction<T: Real>(rho: &DensityMatrix<T>, local_unitary: &CMatrix<T>) -> Result<T> {
    expect_dim(4, rho.dim())?;
    expect_dim(2, local_unitary.nrows())?;
    let err = linalg::unitarity_error(local_unitary);
    if err > crate::scalar::tolerance::<T>(1e-10) {
        return Err(Error::NotUnitary(err));
    }
    let psi = rotated_bell(local_unitary);
    let mut acc = Complex::new(T::zero(), T::zero());
    for r in 0..4 {
        for c in 0..4 {
            acc += psi[r].conj() * rho.matrix()[(r, c)] * psi[c];
        }
    }
    Ok(acc.re)
}
