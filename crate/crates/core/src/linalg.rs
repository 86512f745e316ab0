//! Dense complex linear algebra for few-qubit operators.
//!
//! Everything here works on plain `DMatrix<Complex<T>>`; validated wrappers
//! live in [`crate::state`]. Qubit ordering is big-endian throughout: in
//! `kron(a, b)` the factor `a` owns the most significant index.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Which factor of a bipartite system an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

impl std::fmt::Display for Subsystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Subsystem::A => "A",
            Subsystem::B => "B",
        })
    }
}

pub fn identity<T: Real>(dim: usize) -> CMatrix<T> {
    CMatrix::identity(dim, dim)
}

pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    m.trace()
}

/// Hilbert–Schmidt inner product `tr(a^dag b)`.
pub fn hs_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    a.iter()
        .zip(b.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

pub fn hs_norm<T: Real>(m: &CMatrix<T>) -> T {
    m.iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

/// `tr(a b)` without forming the product.
pub fn trace_of_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    let n = a.nrows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_error<T: Real>(m: &CMatrix<T>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = to_f64((m[(i, j)] - m[(j, i)].conj()).modulus());
            worst = worst.max(d);
        }
    }
    worst
}

/// `(m + m^dag) / 2`.
pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()) * Complex::new(lit::<T>(0.5), T::zero())
}

pub fn ensure_square<T: Real>(m: &CMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Columns of the returned matrix are the matching eigenvectors. Only the
/// Hermitian part of the input is decomposed.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = m.nrows();
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let mut v: Vec<T> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_map<T: Real>(m: &CMatrix<T>, f: impl Fn(T) -> T) -> CMatrix<T> {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &lambda) in values.iter().enumerate() {
        let fl = Complex::new(f(lambda), T::zero());
        for r in 0..n {
            scaled[(r, c)] *= fl;
        }
    }
    scaled * vectors.adjoint()
}

/// Square roots of a nonnegative spectrum, with values at rounding level
/// relative to the largest one treated as exact zeros.
pub fn sqrt_spectrum<T: Real>(values: &[T]) -> Vec<T> {
    let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let floor = scale.max(T::one()) * lit::<T>(crate::scalar::tolerance::<T>(0.0));
    values
        .iter()
        .map(|&v| if v > floor { v.sqrt() } else { T::zero() })
        .collect()
}

/// Square root of a positive semidefinite matrix; tiny negative eigenvalues are clamped.
pub fn sqrt_psd<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    hermitian_map(m, |x| if x > T::zero() { x.sqrt() } else { T::zero() })
}

/// Default eigenvalue floor for inverse square roots.
pub const INV_SQRT_FLOOR: f64 = 1e-8;

/// `m^{-1/2}` for a positive definite Hermitian matrix.
///
/// Fails with [`Error::SingularReducedState`] when the smallest eigenvalue
/// does not exceed `floor`.
pub fn inv_sqrt<T: Real>(m: &CMatrix<T>, floor: f64) -> Result<CMatrix<T>> {
    ensure_square(m)?;
    let (values, vectors) = hermitian_eigen(m);
    let min = to_f64(values[0]);
    if min <= floor {
        return Err(Error::SingularReducedState {
            min_eigenvalue: min,
            floor,
        });
    }
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &lambda) in values.iter().enumerate() {
        let s = Complex::new(T::one() / lambda.sqrt(), T::zero());
        for r in 0..n {
            scaled[(r, c)] *= s;
        }
    }
    Ok(scaled * vectors.adjoint())
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian<T: Real>(m: &CMatrix<T>) -> T {
    hermitian_eigenvalues(m)
        .into_iter()
        .fold(T::zero(), |acc, x| acc + x.abs())
}

/// Max deviation of `u^dag u` from the identity.
pub fn unitarity_error<T: Real>(u: &CMatrix<T>) -> f64 {
    let n = u.nrows();
    let prod = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max(to_f64((prod[(i, j)] - Complex::new(target, T::zero())).modulus()));
        }
    }
    worst
}

/// Partial trace of an operator on `C^da ⊗ C^db`, keeping `keep`.
pub fn partial_trace<T: Real>(m: &CMatrix<T>, da: usize, db: usize, keep: Subsystem) -> CMatrix<T> {
    let zero = Complex::new(T::zero(), T::zero());
    match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, j| {
            (0..db).fold(zero, |acc, k| acc + m[(i * db + k, j * db + k)])
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |i, j| {
            (0..da).fold(zero, |acc, k| acc + m[(k * db + i, k * db + j)])
        }),
    }
}

/// Partial transpose of an operator on `C^da ⊗ C^db` on the given side.
pub fn partial_transpose<T: Real>(
    m: &CMatrix<T>,
    da: usize,
    db: usize,
    side: Subsystem,
) -> CMatrix<T> {
    let n = da * db;
    CMatrix::from_fn(n, n, |r, c| {
        let (a, b) = (r / db, r % db);
        let (a2, b2) = (c / db, c % db);
        match side {
            Subsystem::A => m[(a2 * db + b, a * db + b2)],
            Subsystem::B => m[(a * db + b2, a2 * db + b)],
        }
    })
}

/// Single-qubit Pauli matrix: 0 = I, 1 = X, 2 = Y, 3 = Z.
pub fn pauli<T: Real>(index: usize) -> CMatrix<T> {
    let z = T::zero();
    let o = T::one();
    let c = |re: T, im: T| Complex::new(re, im);
    let entries = match index {
        0 => [c(o, z), c(z, z), c(z, z), c(o, z)],
        1 => [c(z, z), c(o, z), c(o, z), c(z, z)],
        2 => [c(z, z), c(z, -o), c(z, o), c(z, z)],
        3 => [c(o, z), c(z, z), c(z, z), c(-o, z)],
        _ => panic!("Pauli index {index} out of range 0..4"),
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

/// Two-qubit Pauli product `σ_i ⊗ σ_j`.
pub fn pauli_pair<T: Real>(i: usize, j: usize) -> CMatrix<T> {
    kron(&pauli(i), &pauli(j))
}

/// Swap operator on `C^d ⊗ C^d`.
pub fn swap_operator<T: Real>(d: usize) -> CMatrix<T> {
    let n = d * d;
    let mut m = CMatrix::zeros(n, n);
    for a in 0..d {
        for b in 0..d {
            m[(b * d + a, a * d + b)] = Complex::new(T::one(), T::zero());
        }
    }
    m
}

/// Embeds a two-qubit gate acting on qubits `(first, second)` of an
/// `n`-qubit register; `first` is the gate's most significant qubit.
pub fn embed_two_qubit<T: Real>(gate: &CMatrix<T>, first: usize, second: usize, n: usize) -> CMatrix<T> {
    assert!(first < n && second < n && first != second);
    let dim = 1usize << n;
    let bit = |state: usize, q: usize| (state >> (n - 1 - q)) & 1;
    CMatrix::from_fn(dim, dim, |r, c| {
        // Untouched qubits must agree between row and column.
        for q in 0..n {
            if q != first && q != second && bit(r, q) != bit(c, q) {
                return Complex::new(T::zero(), T::zero());
            }
        }
        let gr = bit(r, first) * 2 + bit(r, second);
        let gc = bit(c, first) * 2 + bit(c, second);
        gate[(gr, gc)]
    })
}

/// Embeds a single-qubit gate on qubit `target` of an `n`-qubit register.
pub fn embed_single<T: Real>(gate: &CMatrix<T>, target: usize, n: usize) -> CMatrix<T> {
    let left = identity::<T>(1 << target);
    let right = identity::<T>(1 << (n - 1 - target));
    kron(&kron(&left, gate), &right)
}

/// Outer product `|v><v|` of a column vector given as a slice.
pub fn projector<T: Real>(v: &[Complex<T>]) -> CMatrix<T> {
    let n = v.len();
    CMatrix::from_fn(n, n, |r, c| v[r] * v[c].conj())
}

/// `exp(-i * angle/2 * σ_axis)` for axis 1 = x, 2 = y, 3 = z.
pub fn rotation<T: Real>(axis: usize, angle: T) -> CMatrix<T> {
    let half = angle * lit(0.5);
    let (c, s) = (half.cos(), half.sin());
    let cos_i = identity::<T>(2) * Complex::new(c, T::zero());
    cos_i - pauli::<T>(axis) * Complex::new(T::zero(), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = CMatrix<f64>;

    fn diag(values: &[f64]) -> M {
        let n = values.len();
        M::from_fn(n, n, |r, c| if r == c { cplx(values[r], 0.0) } else { cplx(0.0, 0.0) })
    }

    #[test]
    fn partial_trace_of_product_factorizes() {
        let a = M::from_row_slice(2, 2, &[cplx(0.7, 0.0), cplx(0.1, 0.2), cplx(0.1, -0.2), cplx(0.3, 0.0)]);
        let b = diag(&[0.4, 0.6]);
        let ab = kron(&a, &b);
        assert!((partial_trace(&ab, 2, 2, Subsystem::A) - &a).norm() < 1e-15);
        assert!((partial_trace(&ab, 2, 2, Subsystem::B) - &b).norm() < 1e-15);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let m = M::from_fn(4, 4, |r, c| cplx(r as f64 + 0.5 * c as f64, (r * c) as f64 - 1.0));
        for side in [Subsystem::A, Subsystem::B] {
            let twice = partial_transpose(&partial_transpose(&m, 2, 2, side), 2, 2, side);
            assert_eq!(twice, m);
        }
        let full = partial_transpose(&partial_transpose(&m, 2, 2, Subsystem::A), 2, 2, Subsystem::B);
        assert_eq!(full, m.transpose());
    }

    #[test]
    fn inv_sqrt_scalar_arithmetic() {
        let m = diag(&[1.5, 0.5]);
        let r = inv_sqrt(&m, INV_SQRT_FLOOR).unwrap();
        assert!((r[(0, 0)].re - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((r[(1, 1)].re - 2.0f64.sqrt()).abs() < 1e-14);
        assert!(matches!(
            inv_sqrt(&diag(&[2.0, 0.0]), INV_SQRT_FLOOR),
            Err(Error::SingularReducedState { .. })
        ));
    }

    #[test]
    fn embedded_gate_matches_kron_for_adjacent_qubits() {
        let g = kron(&pauli::<f64>(1), &pauli::<f64>(2));
        let full = embed_two_qubit(&g, 0, 1, 3);
        let expected = kron(&g, &identity(2));
        assert!((full - expected).norm() < 1e-15);
        let swapped = embed_two_qubit(&g, 1, 0, 2);
        let expected = kron(&pauli::<f64>(2), &pauli::<f64>(1));
        assert!((swapped - expected).norm() < 1e-15);
    }

    #[test]
    fn rotation_convention() {
        // R_y(pi) |0> = |1>
        let r = rotation::<f64>(2, std::f64::consts::PI);
        assert!((r[(1, 0)].re - 1.0).abs() < 1e-15);
        assert!(unitarity_error(&r) < 1e-15);
    }

    #[test]
    fn swap_squares_to_identity() {
        let s = swap_operator::<f64>(3);
        assert!((&s * &s - identity::<f64>(9)).norm() < 1e-15);
    }
}
