//! Validated state and observable carriers.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Subsystem};
use crate::scalar::{lit, to_f64, tolerance, Real};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything lower is rejected.
pub const PSD_TOL: f64 = 1e-9;

/// Wire form shared by every serialized matrix: row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &CMatrix<T>) -> Self {
        let dim = m.nrows();
        let mut re = Vec::with_capacity(dim * dim);
        let mut im = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..m.ncols() {
                re.push(to_f64(m[(r, c)].re));
                im.push(to_f64(m[(r, c)].im));
            }
        }
        MatrixJson { dim, re, im }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<CMatrix<T>> {
        let n = self.dim * self.dim;
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::Format(format!(
                "dim {} needs {} entries, got re={} im={}",
                self.dim,
                n,
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(CMatrix::from_fn(self.dim, self.dim, |r, c| {
            let k = r * self.dim + c;
            Complex::new(lit(self.re[k]), lit(self.im[k]))
        }))
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    m: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates `m` as a state. Slightly negative eigenvalues (down to
    /// `-PSD_TOL`) are clamped and the trace re-fixed.
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        linalg::ensure_square(&m)?;
        let herm = linalg::hermiticity_error(&m);
        if herm > tolerance::<T>(HERMITIAN_TOL) {
            return Err(Error::NotHermitian(herm));
        }
        let tr = to_f64(m.trace().re);
        if (tr - 1.0).abs() > tolerance::<T>(TRACE_TOL) {
            return Err(Error::InvalidTrace(tr));
        }
        let m = linalg::hermitian_part(&m);
        let (values, vectors) = linalg::hermitian_eigen(&m);
        let min = to_f64(values[0]);
        if min < -tolerance::<T>(PSD_TOL) {
            return Err(Error::NotPositive(min));
        }
        if min >= 0.0 {
            return Ok(DensityMatrix { m });
        }
        let clamped: Vec<T> = values.iter().map(|&v| v.max(T::zero())).collect();
        let total = clamped.iter().fold(T::zero(), |a, &b| a + b);
        let n = clamped.len();
        let mut scaled = vectors.clone();
        for (c, &v) in clamped.iter().enumerate() {
            for r in 0..n {
                scaled[(r, c)] *= Complex::new(v / total, T::zero());
            }
        }
        Ok(DensityMatrix {
            m: linalg::hermitian_part(&(scaled * vectors.adjoint())),
        })
    }

    /// Normalizes a nonzero PSD matrix by its trace, then validates.
    pub fn from_unnormalized(m: CMatrix<T>) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > T::zero()) {
            return Err(Error::InvalidTrace(to_f64(tr)));
        }
        Self::new(m / Complex::new(tr, T::zero()))
    }

    /// `|psi><psi|` for a (not necessarily normalized) nonzero ket.
    pub fn from_pure(psi: &[Complex<T>]) -> Result<Self> {
        let norm = psi.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        if !(norm > T::zero()) {
            return Err(Error::InvalidTrace(0.0));
        }
        Self::new(linalg::projector(psi) / Complex::new(norm, T::zero()))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let scale = Complex::new(T::one() / lit(dim as f64), T::zero());
        DensityMatrix {
            m: linalg::identity::<T>(dim) * scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    pub fn purity(&self) -> T {
        linalg::trace_of_product(&self.m, &self.m).re
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        linalg::hermitian_eigenvalues(&self.m)
    }

    /// `tr(O ρ)` for a Hermitian observable of matching dimension.
    pub fn expectation(&self, obs: &Observable<T>) -> Result<T> {
        expect_dim(obs.dim(), self.dim())?;
        Ok(linalg::trace_of_product(obs.matrix(), &self.m).re)
    }

    pub fn kron(&self, other: &Self) -> Self {
        DensityMatrix {
            m: linalg::kron(&self.m, &other.m),
        }
    }

    /// `U ρ U^dag` for a unitary of matching dimension.
    pub fn conjugate(&self, u: &CMatrix<T>) -> Result<Self> {
        expect_dim(self.dim(), u.nrows())?;
        Self::new(u * &self.m * u.adjoint())
    }

    /// Reduced state of one qubit of a two-qubit state.
    pub fn partial_trace(&self, keep: Subsystem) -> Result<Self> {
        expect_dim(4, self.dim())?;
        Self::new(linalg::partial_trace(&self.m, 2, 2, keep))
    }

    /// Partial transpose of a two-qubit state; Hermitian but not necessarily PSD.
    pub fn partial_transpose(&self, side: Subsystem) -> Result<Observable<T>> {
        expect_dim(4, self.dim())?;
        Ok(Observable {
            m: linalg::partial_transpose(&self.m, 2, 2, side),
        })
    }

    /// Bloch vector `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of a single-qubit state.
    pub fn bloch(&self) -> Result<[T; 3]> {
        expect_dim(2, self.dim())?;
        Ok(bloch_of(&self.m))
    }

    pub fn from_bloch(r: [T; 3]) -> Result<Self> {
        let half = Complex::new(lit::<T>(0.5), T::zero());
        let mut m = linalg::identity::<T>(2);
        for (k, &x) in r.iter().enumerate() {
            m += linalg::pauli::<T>(k + 1) * Complex::new(x, T::zero());
        }
        Self::new(m * half)
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(&self.m)
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        Self::new(j.to_matrix()?)
    }
}

pub(crate) fn bloch_of<T: Real>(m: &CMatrix<T>) -> [T; 3] {
    // tr(σ_k m) written out for 2x2
    let x = m[(0, 1)].re + m[(1, 0)].re;
    let y = m[(1, 0)].im - m[(0, 1)].im;
    let z = m[(0, 0)].re - m[(1, 1)].re;
    [x, y, z]
}

pub(crate) fn expect_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

impl<T: Real> Serialize for DensityMatrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for DensityMatrix<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        Self::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// A Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<T: Real> {
    m: CMatrix<T>,
}

impl<T: Real> Observable<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        linalg::ensure_square(&m)?;
        let herm = linalg::hermiticity_error(&m);
        if herm > tolerance::<T>(HERMITIAN_TOL) {
            return Err(Error::NotHermitian(herm));
        }
        Ok(Observable {
            m: linalg::hermitian_part(&m),
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Observable {
            m: CMatrix::zeros(dim, dim),
        }
    }

    pub fn pauli_pair(i: usize, j: usize) -> Self {
        Observable {
            m: linalg::pauli_pair(i, j),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    pub fn trace(&self) -> T {
        self.m.trace().re
    }

    pub fn hs_norm(&self) -> T {
        linalg::hs_norm(&self.m)
    }

    /// Real Hilbert–Schmidt inner product `tr(self · other)`.
    pub fn hs_inner(&self, other: &Self) -> T {
        linalg::hs_inner(&self.m, &other.m).re
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        linalg::hermitian_eigenvalues(&self.m)
    }

    pub fn determinant(&self) -> T {
        self.m.determinant().re
    }

    pub fn scale(&self, s: T) -> Self {
        Observable {
            m: &self.m * Complex::new(s, T::zero()),
        }
    }

    /// Removes the identity component, leaving a traceless operator.
    pub fn traceless_part(&self) -> Self {
        let n = self.dim();
        let shift = self.trace() / lit(n as f64);
        Observable {
            m: &self.m - linalg::identity::<T>(n) * Complex::new(shift, T::zero()),
        }
    }

    /// Unit Hilbert–Schmidt norm version of this operator.
    pub fn normalized(&self) -> Self {
        let n = self.hs_norm();
        if n > T::zero() {
            self.scale(T::one() / n)
        } else {
            self.clone()
        }
    }

    pub fn partial_transpose(&self, side: Subsystem) -> Result<Self> {
        expect_dim(4, self.dim())?;
        Ok(Observable {
            m: linalg::partial_transpose(&self.m, 2, 2, side),
        })
    }

    /// `S O S^dag` for an arbitrary (not necessarily unitary) `S`.
    pub fn congruence(&self, s: &CMatrix<T>) -> Result<Self> {
        expect_dim(self.dim(), s.nrows())?;
        Observable::new(s * &self.m * s.adjoint())
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(&self.m)
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        Self::new(j.to_matrix()?)
    }
}

impl<T: Real> Serialize for Observable<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Observable<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        Self::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// The 15 non-identity Pauli expectations `tr(σ_i ⊗ σ_j ρ)` of a two-qubit
/// operator, in row-major `(i, j)` order with `(0, 0)` skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector<T: Real> {
    pub coeffs: [T; 15],
}

impl<T: Real> PauliVector<T> {
    /// `(i, j)` label of coefficient `k`.
    pub fn label(k: usize) -> (usize, usize) {
        ((k + 1) / 4, (k + 1) % 4)
    }

    pub fn from_density(rho: &DensityMatrix<T>) -> Result<Self> {
        expect_dim(4, rho.dim())?;
        Ok(Self::from_matrix(rho.matrix()))
    }

    pub fn from_matrix(m: &CMatrix<T>) -> Self {
        let mut coeffs = [T::zero(); 15];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let (i, j) = Self::label(k);
            *c = linalg::trace_of_product(&linalg::pauli_pair::<T>(i, j), m).re;
        }
        PauliVector { coeffs }
    }

    /// `(I + Σ c_ij σ_i⊗σ_j) / 4`, unvalidated.
    pub fn to_matrix(&self) -> CMatrix<T> {
        let mut m = linalg::identity::<T>(4);
        for (k, &c) in self.coeffs.iter().enumerate() {
            let (i, j) = Self::label(k);
            m += linalg::pauli_pair::<T>(i, j) * Complex::new(c, T::zero());
        }
        m * Complex::new(lit::<T>(0.25), T::zero())
    }

    pub fn to_density(&self) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.to_matrix())
    }
}
