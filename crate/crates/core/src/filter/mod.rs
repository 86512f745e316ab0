//! Local filtering operations `F = 1/sqrt(2ρ_X)` and their two execution
//! paths: a direct Kraus update and an ancilla-assisted circuit with
//! post-selection.

pub mod nmr;
pub mod protocol;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Subsystem, INV_SQRT_FLOOR};
use crate::scalar::{lit, to_f64, Real};
use crate::state::{expect_dim, DensityMatrix};

/// Success probabilities at or below this are treated as impossible post-selections.
pub const MIN_SUCCESS_PROB: f64 = 1e-10;

/// Recorded `γ`/`θ` must match the SVD of the recorded matrix this closely.
pub const RECORDED_PARAM_TOL: f64 = 1e-9;

/// A single-qubit filter `F = scale · U · diag(1, sqrt(1−γ)) · V`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOp<T: Real> {
    pub f: CMatrix<T>,
    pub u: CMatrix<T>,
    pub v: CMatrix<T>,
    pub gamma: T,
    /// `2·arccos(sqrt(1−γ))`, the controlled-rotation angle of the ancilla gate.
    pub theta: T,
    /// Largest singular value of `f`.
    pub scale: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ExecutionPath {
    #[default]
    Direct,
    Ancilla,
}

impl<T: Real> FilterOp<T> {
    /// Decomposes an invertible 2×2 matrix.
    pub fn from_matrix(f: CMatrix<T>) -> Result<Self> {
        if f.nrows() != 2 || f.ncols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: f.nrows().max(f.ncols()),
            });
        }
        let svd = f.clone().svd(true, true);
        let (mut u, mut vt) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^T"));
        let mut s = [svd.singular_values[0], svd.singular_values[1]];
        if s[0] < s[1] {
            s.swap(0, 1);
            u.swap_columns(0, 1);
            vt.swap_rows(0, 1);
        }
        if !(s[1] > T::zero()) {
            return Err(Error::SingularReducedState {
                min_eigenvalue: to_f64(s[1]),
                floor: 0.0,
            });
        }
        let ratio = (s[1] / s[0]).min(T::one());
        Ok(FilterOp {
            f,
            u,
            v: vt,
            gamma: T::one() - ratio * ratio,
            theta: lit::<T>(2.0) * ratio.acos(),
            scale: s[0],
        })
    }

    /// Like [`FilterOp::from_matrix`] but keeps previously recorded `γ` and `θ`
    /// after checking them against the decomposition.
    pub fn with_recorded(f: CMatrix<T>, gamma: T, theta: T) -> Result<Self> {
        let mut op = Self::from_matrix(f)?;
        let tol = crate::scalar::tolerance::<T>(RECORDED_PARAM_TOL);
        let dg = to_f64((op.gamma - gamma).abs());
        let dt = to_f64((op.theta - theta).abs());
        if dg > tol || dt > tol {
            return Err(Error::Format(format!(
                "recorded gamma/theta disagree with the filter matrix (|Δγ| = {dg:e}, |Δθ| = {dt:e})"
            )));
        }
        op.gamma = gamma;
        op.theta = theta;
        Ok(op)
    }

    pub fn identity() -> Self {
        Self::from_matrix(linalg::identity(2)).expect("identity is invertible")
    }

    /// `diag(1, sqrt(1−γ))`.
    pub fn lambda(&self) -> CMatrix<T> {
        let mut m = linalg::identity::<T>(2);
        m[(1, 1)] = Complex::new((T::one() - self.gamma).max(T::zero()).sqrt(), T::zero());
        m
    }

    /// The trace-nonincreasing Kraus operator `F / scale`.
    pub fn kraus(&self) -> CMatrix<T> {
        &self.f / Complex::new(self.scale, T::zero())
    }

    /// `later ∘ self`: the single filter equal to applying `self` then `later`.
    pub fn then(&self, later: &FilterOp<T>) -> Result<Self> {
        Self::from_matrix(&later.f * &self.f)
    }

    /// Largest deviation of `scale·U·Λ·V` from `F`.
    pub fn decomposition_error(&self) -> f64 {
        let rebuilt = &self.u * self.lambda() * &self.v * Complex::new(self.scale, T::zero());
        to_f64((rebuilt - &self.f).norm())
    }
}

/// `F = 1/sqrt(2ρ)` built from a single-qubit marginal.
pub fn filter_from_marginal<T: Real>(marginal: &DensityMatrix<T>) -> Result<FilterOp<T>> {
    expect_dim(2, marginal.dim())?;
    let inv = linalg::inv_sqrt(marginal.matrix(), INV_SQRT_FLOOR)?;
    FilterOp::from_matrix(inv * Complex::new(lit::<T>(std::f64::consts::FRAC_1_SQRT_2), T::zero()))
}

/// The controlled rotation on `(ancilla, system)`: identity when the system
/// is `|0>`, `R_{−y}(θ)` on the ancilla when it is `|1>`.
pub fn ancilla_unitary<T: Real>(gamma: T) -> Result<CMatrix<T>> {
    let g = to_f64(gamma);
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::out_of_range("gamma", g, 0.0, 1.0));
    }
    let c = Complex::new((T::one() - gamma).sqrt(), T::zero());
    let s = Complex::new(gamma.sqrt(), T::zero());
    let mut m = linalg::identity::<T>(4);
    m[(1, 1)] = c;
    m[(1, 3)] = s;
    m[(3, 1)] = -s;
    m[(3, 3)] = c;
    Ok(m)
}

fn local_on<T: Real>(k: &CMatrix<T>, side: Subsystem) -> CMatrix<T> {
    let id = linalg::identity::<T>(2);
    match side {
        Subsystem::A => linalg::kron(k, &id),
        Subsystem::B => linalg::kron(&id, k),
    }
}

fn normalize_post<T: Real>(post: CMatrix<T>) -> Result<(DensityMatrix<T>, T)> {
    let p = linalg::trace(&post).re;
    if !(to_f64(p) > MIN_SUCCESS_PROB) {
        return Err(Error::PostSelectionImpossible(to_f64(p)));
    }
    let state = DensityMatrix::new(linalg::hermitian_part(&(post / Complex::new(p, T::zero()))))?;
    Ok((state, p))
}

/// `K ρ K† / tr(K ρ K†)` for an arbitrary operator `K` on one side, with the
/// unnormalized weight `tr(K ρ K†)`.
pub fn apply_local_operator<T: Real>(
    rho: &DensityMatrix<T>,
    k: &CMatrix<T>,
    side: Subsystem,
) -> Result<(DensityMatrix<T>, T)> {
    expect_dim(4, rho.dim())?;
    expect_dim(2, k.nrows())?;
    let full = local_on(k, side);
    normalize_post(&full * rho.matrix() * full.adjoint())
}

/// `(K_A ⊗ K_B) ρ (K_A ⊗ K_B)†`, normalized, with its weight.
pub fn apply_local_pair<T: Real>(
    rho: &DensityMatrix<T>,
    ka: &CMatrix<T>,
    kb: &CMatrix<T>,
) -> Result<(DensityMatrix<T>, T)> {
    expect_dim(4, rho.dim())?;
    let full = linalg::kron(ka, kb);
    normalize_post(&full * rho.matrix() * full.adjoint())
}

/// The three-qubit circuit `(U)·U_1X·(V)` on register (ancilla, A, B).
pub fn ancilla_circuit<T: Real>(filter: &FilterOp<T>, side: Subsystem) -> Result<CMatrix<T>> {
    let target = match side {
        Subsystem::A => 1,
        Subsystem::B => 2,
    };
    let gate = ancilla_unitary(filter.gamma)?;
    Ok(linalg::embed_single(&filter.u, target, 3)
        * linalg::embed_two_qubit(&gate, 0, target, 3)
        * linalg::embed_single(&filter.v, target, 3))
}

/// Applies the normalized filter to one side and returns the post-selected
/// state with its success probability.
pub fn apply_filter<T: Real>(
    rho: &DensityMatrix<T>,
    filter: &FilterOp<T>,
    side: Subsystem,
    path: ExecutionPath,
) -> Result<(DensityMatrix<T>, T)> {
    expect_dim(4, rho.dim())?;
    match path {
        ExecutionPath::Direct => apply_local_operator(rho, &filter.kraus(), side),
        ExecutionPath::Ancilla => {
            let circuit = ancilla_circuit(filter, side)?;
            // Ancilla starts in |0>: the register state is |0><0| ⊗ ρ.
            let mut register = CMatrix::<T>::zeros(8, 8);
            register.view_mut((0, 0), (4, 4)).copy_from(rho.matrix());
            let out = &circuit * register * circuit.adjoint();
            normalize_post(out.view((0, 0), (4, 4)).into_owned())
        }
    }
}
