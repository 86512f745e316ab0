//! Determinant of the partial transpose from joint measurements on several
//! copies of a two-qubit state.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Subsystem};
use crate::scalar::{lit, to_f64, Real};
use crate::state::{expect_dim, DensityMatrix, Observable};

/// Observable on `copies` copies of a two-qubit state, copy order
/// `A1 B1 A2 B2 …` (copy 1 most significant).
#[derive(Debug, Clone)]
pub struct MultiCopyObservable<T: Real> {
    pub copies: usize,
    pub entries: CMatrix<T>,
    /// Nonzero entries `(row, col, value)`, kept for fast expectations.
    nonzeros: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> MultiCopyObservable<T> {
    pub fn new(copies: usize, entries: CMatrix<T>) -> Result<Self> {
        let dim = 4usize.pow(copies as u32);
        expect_dim(dim, entries.nrows())?;
        linalg::ensure_square(&entries)?;
        let err = linalg::hermiticity_error(&entries);
        if err > crate::scalar::tolerance::<T>(1e-12) {
            return Err(Error::NotHermitian(err));
        }
        let mut nonzeros = Vec::new();
        for c in 0..dim {
            for r in 0..dim {
                let z = entries[(r, c)];
                if z.re != T::zero() || z.im != T::zero() {
                    nonzeros.push((r, c, z));
                }
            }
        }
        Ok(MultiCopyObservable { copies, entries, nonzeros })
    }

    pub fn nonzero_count(&self) -> usize {
        self.nonzeros.len()
    }

    /// `tr(W · X^⊗r)` for any 4×4 operator `X`, without forming the power.
    pub fn expectation_product(&self, x: &CMatrix<T>) -> Result<Complex<T>> {
        expect_dim(4, x.nrows())?;
        linalg::ensure_square(x)?;
        let mut acc = Complex::new(T::zero(), T::zero());
        for &(r, c, w) in &self.nonzeros {
            let mut prod = w;
            for k in (0..self.copies).rev() {
                let shift = 2 * (self.copies - 1 - k);
                prod *= x[((c >> shift) & 3, (r >> shift) & 3)];
            }
            acc += prod;
        }
        Ok(acc)
    }

    /// `tr(W · ρ^⊗r)`.
    pub fn expectation(&self, rho: &DensityMatrix<T>) -> Result<T> {
        Ok(self.expectation_product(rho.matrix())?.re)
    }
}

/// All permutations of `0..n` with their signs.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    fn extend(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<(Vec<usize>, i32)>) {
        if prefix.len() == n {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            out.push((prefix.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 0..n {
            if !prefix.contains(&v) {
                prefix.push(v);
                extend(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), n, &mut out);
    out
}

/// `(1/n!) Σ_π sgn(π) P_π` on `(C^d)^⊗n`; `tr(Π X^⊗n)` is the `n`-th
/// elementary symmetric polynomial of the eigenvalues of `X`.
pub fn antisymmetrizer<T: Real>(d: usize, n: usize) -> CMatrix<T> {
    let dim = d.pow(n as u32);
    let perms = signed_permutations(n);
    let weight = 1.0 / perms.len() as f64;
    let mut m = CMatrix::<T>::zeros(dim, dim);
    let mut digits = vec![0usize; n];
    for col in 0..dim {
        let mut rest = col;
        for slot in digits.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        for (perm, sign) in &perms {
            let row = perm.iter().fold(0, |acc, &p| acc * d + digits[p]);
            m[(row, col)] += Complex::new(lit::<T>(*sign as f64 * weight), T::zero());
        }
    }
    m
}

/// Partial transpose of every `A_k` factor of an `r`-copy operator.
fn transpose_a_factors<T: Real>(m: &CMatrix<T>, copies: usize) -> CMatrix<T> {
    let mask = (0..copies).fold(0usize, |acc, k| acc | (2 << (2 * k)));
    let dim = m.nrows();
    let mut out = CMatrix::<T>::zeros(dim, dim);
    for c in 0..dim {
        for r in 0..dim {
            let swapped_r = (r & !mask) | (c & mask);
            let swapped_c = (c & !mask) | (r & mask);
            out[(swapped_r, swapped_c)] = m[(r, c)];
        }
    }
    out
}

/// `W` with `tr(W ρ^⊗4) = det(ρ^{T_A})` for every two-qubit `ρ`.
pub fn four_copy_det_observable<T: Real>() -> MultiCopyObservable<T> {
    let w = transpose_a_factors(&antisymmetrizer::<T>(4, 4), 4);
    MultiCopyObservable::new(4, w).expect("antisymmetrizer is Hermitian")
}

/// Number of single-copy expectation values the two-copy scheme reads.
pub const SINGLE_COPY_OUTCOMES: usize = 9;
/// Single-copy values plus the one two-copy expectation.
pub const TWO_COPY_OUTCOMES: usize = SINGLE_COPY_OUTCOMES + 1;

/// `(|p><q|)^{T_A}` as a 4×4 matrix.
fn transposed_unit<T: Real>(p: usize, q: usize) -> CMatrix<T> {
    let mut e = CMatrix::<T>::zeros(4, 4);
    e[(p, q)] = Complex::new(T::one(), T::zero());
    linalg::partial_transpose(&e, 2, 2, Subsystem::A)
}

/// The nine Hermitian observables whose expectations give the upper-left
/// 3×3 block of `ρ^{T_A}`: diagonals, then `(Re, Im)` for each `i < j`.
pub fn block_observables<T: Real>() -> Vec<Observable<T>> {
    let mut out = Vec::with_capacity(SINGLE_COPY_OUTCOMES);
    for i in 0..3 {
        out.push(Observable::new(transposed_unit::<T>(i, i)).expect("Hermitian"));
    }
    let half = Complex::new(lit::<T>(0.5), T::zero());
    let half_i = Complex::new(T::zero(), lit::<T>(0.5));
    for i in 0..3 {
        for j in i + 1..3 {
            let (eij, eji) = (transposed_unit::<T>(i, j), transposed_unit::<T>(j, i));
            // tr(X(E_ji + E_ij))/2 = Re X_ij,  tr(X(i E_ij − i E_ji))/2 = Im X_ij.
            out.push(Observable::new((&eji + &eij) * half).expect("Hermitian"));
            out.push(Observable::new((&eij - &eji) * half_i).expect("Hermitian"));
        }
    }
    out
}

fn block_from_values<T: Real>(values: &[T]) -> CMatrix<T> {
    let mut r = CMatrix::<T>::zeros(3, 3);
    for i in 0..3 {
        r[(i, i)] = Complex::new(values[i], T::zero());
    }
    let mut k = 3;
    for i in 0..3 {
        for j in i + 1..3 {
            let z = Complex::new(values[k], values[k + 1]);
            r[(i, j)] = z;
            r[(j, i)] = z.conj();
            k += 2;
        }
    }
    r
}

fn adjugate3<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let mut adj = CMatrix::<T>::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            adj[(i, j)] = m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)];
        }
    }
    adj
}

fn det3<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    let adj = adjugate3(m);
    (0..3).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + m[(0, k)] * adj[(k, 0)])
}

/// Two-copy observable for `−s† adj(R) s`, where `s` is the last column of
/// `ρ^{T_A}` above the diagonal.
pub fn two_copy_observable<T: Real>(r_block: &CMatrix<T>) -> Result<Observable<T>> {
    expect_dim(3, r_block.nrows())?;
    let adj = adjugate3(r_block);
    let mut o = CMatrix::<T>::zeros(16, 16);
    for i in 0..3 {
        for j in 0..3 {
            // tr(E^{T_A}_{i3} X^{T_A}) = X_{3i} = conj(s_i), and likewise X_{j3} = s_j.
            let term = linalg::kron(&transposed_unit::<T>(i, 3), &transposed_unit::<T>(3, j));
            o -= term * adj[(i, j)];
        }
    }
    Observable::new(linalg::hermitian_part(&o))
}

#[derive(Debug, Clone)]
pub struct TwoCopyEstimate<T: Real> {
    pub det_estimate: T,
    pub outcome_count: usize,
    pub r_block: CMatrix<T>,
    /// `T = 1 − tr R`.
    pub t: T,
    /// `T · det R`, fixed by the single-copy data.
    pub known: T,
    /// `tr(O₂ ρ^⊗2)`.
    pub two_copy_value: T,
    /// Built from the measured `R`, so it is specific to the input.
    pub o2: Observable<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoCopySummary {
    pub det_estimate: f64,
    pub outcome_count: usize,
    pub t: f64,
    pub known: f64,
    pub two_copy_value: f64,
}

impl<T: Real> TwoCopyEstimate<T> {
    pub fn summary(&self) -> TwoCopySummary {
        TwoCopySummary {
            det_estimate: to_f64(self.det_estimate),
            outcome_count: self.outcome_count,
            t: to_f64(self.t),
            known: to_f64(self.known),
            two_copy_value: to_f64(self.two_copy_value),
        }
    }
}

/// `det(ρ^{T_A})` from nine single-copy values and one two-copy expectation.
pub fn two_copy_scheme<T: Real>(rho: &DensityMatrix<T>) -> Result<TwoCopyEstimate<T>> {
    expect_dim(4, rho.dim())?;
    let values = block_observables::<T>()
        .iter()
        .map(|o| rho.expectation(o))
        .collect::<Result<Vec<_>>>()?;
    let r_block = block_from_values(&values);
    let t = T::one() - linalg::trace(&r_block).re;
    let known = t * det3(&r_block).re;
    let o2 = two_copy_observable(&r_block)?;
    let rho2 = rho.kron(rho);
    let two_copy_value = rho2.expectation(&o2)?;
    Ok(TwoCopyEstimate {
        det_estimate: known + two_copy_value,
        outcome_count: values.len() + 1,
        r_block,
        t,
        known,
        two_copy_value,
        o2,
    })
}

/// Entries of `ρ^{T_A}` compared by the incompleteness check.
const BLOCK_TOL: f64 = 1e-12;

/// True when `rho` and `sigma` agree on the measured block and trace of the
/// partial transpose but differ in the unmeasured column.
pub fn tomography_incompleteness_check<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> bool {
    if rho.dim() != 4 || sigma.dim() != 4 {
        return false;
    }
    let x = linalg::partial_transpose(rho.matrix(), 2, 2, Subsystem::A);
    let y = linalg::partial_transpose(sigma.matrix(), 2, 2, Subsystem::A);
    let tol = crate::scalar::tolerance::<T>(BLOCK_TOL);
    let diff = |i: usize, j: usize| to_f64((x[(i, j)] - y[(i, j)]).norm_sqr()).sqrt();
    let same_block = (0..3).all(|i| (0..3).all(|j| diff(i, j) <= tol));
    let same_trace = to_f64((linalg::trace(&x) - linalg::trace(&y)).norm_sqr()).sqrt() <= tol;
    let column_differs = (0..3).any(|i| diff(i, 3) > tol);
    same_block && same_trace && column_differs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::ppt_determinant;
    use crate::families::bell_phi_plus;
    use crate::random::{random_density_matrix, rng_from_seed, random_traceless_hermitian};

    #[test]
    fn antisymmetrizer_gives_determinant() {
        let pi = MultiCopyObservable::<f64>::new(4, antisymmetrizer::<f64>(4, 4)).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let x = random_traceless_hermitian::<f64, _>(&mut rng, 4).matrix() + linalg::identity::<f64>(4) * Complex::new(0.1, 0.0);
            let lhs = pi.expectation_product(&x).unwrap();
            assert!((lhs.re - x.determinant().re).abs() < 1e-12 && lhs.im.abs() < 1e-12);
        }
    }

    #[test]
    fn four_copy_examples() {
        let w = four_copy_det_observable::<f64>();
        assert!(w.nonzero_count() <= 24 * 256);
        let mixed = DensityMatrix::<f64>::maximally_mixed(4);
        assert!((w.expectation(&mixed).unwrap() - 1.0 / 256.0).abs() < 1e-15);
        let bell = DensityMatrix::<f64>::from_pure(&bell_phi_plus()).unwrap();
        assert!((w.expectation(&bell).unwrap() + 1.0 / 16.0).abs() < 1e-14);
        for seed in 0..20 {
            let rho = random_density_matrix::<f64>(4, 4, seed).unwrap();
            let d = ppt_determinant(&rho).unwrap();
            assert!((w.expectation(&rho).unwrap() - d).abs() < 1e-12);
        }
    }

    #[test]
    fn two_copy_examples() {
        let mixed = DensityMatrix::<f64>::maximally_mixed(4);
        let est = two_copy_scheme(&mixed).unwrap();
        assert_eq!(est.outcome_count, 10);
        assert!((est.det_estimate - 1.0 / 256.0).abs() < 1e-15);
        let bell = DensityMatrix::<f64>::from_pure(&bell_phi_plus()).unwrap();
        assert!((two_copy_scheme(&bell).unwrap().det_estimate + 1.0 / 16.0).abs() < 1e-14);
        for seed in 0..20 {
            let rho = random_density_matrix::<f64>(4, 2, seed).unwrap();
            let d = ppt_determinant(&rho).unwrap();
            assert!((two_copy_scheme(&rho).unwrap().det_estimate - d).abs() < 1e-12);
        }
    }

    fn perturbed(rho: &DensityMatrix<f64>, i: usize, j: usize, eps: f64) -> DensityMatrix<f64> {
        let mut x = linalg::partial_transpose(rho.matrix(), 2, 2, Subsystem::A);
        x[(i, j)] += Complex::new(eps, 0.0);
        x[(j, i)] += Complex::new(eps, 0.0);
        DensityMatrix::new(linalg::partial_transpose(&x, 2, 2, Subsystem::A)).unwrap()
    }

    #[test]
    fn incompleteness_examples() {
        let rho = DensityMatrix::<f64>::maximally_mixed(4);
        assert!(!tomography_incompleteness_check(&rho, &rho));
        let shifted = perturbed(&rho, 0, 3, 0.05);
        assert!(tomography_incompleteness_check(&rho, &shifted));
        let est_a = two_copy_scheme(&rho).unwrap();
        let est_b = two_copy_scheme(&shifted).unwrap();
        assert_eq!(est_a.r_block, est_b.r_block);
        assert!((est_a.det_estimate - est_b.det_estimate).abs() > 1e-6);
        assert!(!tomography_incompleteness_check(&rho, &perturbed(&rho, 0, 1, 0.05)));
    }
}
