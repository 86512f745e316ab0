//! Seeded samplers for states, unitaries and directions.
//!
//! Mixed states are drawn from the measure induced by partial tracing a
//! random pure state: `ρ = G G^dag / tr(G G^dag)` with `G` a `dim × rank`
//! matrix of standard complex Gaussians. `rank == dim` is the
//! Hilbert–Schmidt measure.

use nalgebra::ComplexField;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::scalar::{lit, Real};
use crate::state::{DensityMatrix, Observable};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent child seed, e.g. one per restart or per sweep point.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit(re * std::f64::consts::FRAC_1_SQRT_2), lit(im * std::f64::consts::FRAC_1_SQRT_2))
}

pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_density_matrix_with<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> Result<DensityMatrix<T>> {
    if rank == 0 || rank > dim {
        return Err(Error::out_of_range("rank", rank as f64, 1.0, dim as f64));
    }
    let g = gaussian_matrix::<T, R>(rng, dim, rank);
    DensityMatrix::from_unnormalized(&g * g.adjoint())
}

/// Deterministic draw for a fixed `seed`.
pub fn random_density_matrix<T: Real>(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix<T>> {
    random_density_matrix_with(&mut rng_from_seed(seed), dim, rank)
}

pub fn random_pure_ket<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex<T>> {
    let v: Vec<Complex<T>> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-random unitary via QR of a Gaussian matrix with phase correction.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<T> {
    let qr = gaussian_matrix::<T, R>(rng, dim, dim).qr();
    let (mut q, r) = qr.unpack();
    for c in 0..dim {
        let d = r[(c, c)];
        let n = d.modulus();
        let phase = if n > T::zero() { d / n } else { Complex::new(T::one(), T::zero()) };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// Random product state `ρ_A ⊗ ρ_B` of two qubits with Hilbert–Schmidt factors.
pub fn random_product_state<T: Real, R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix<T> {
    let a = random_density_matrix_with::<T, R>(rng, 2, 2).expect("valid rank");
    let b = random_density_matrix_with::<T, R>(rng, 2, 2).expect("valid rank");
    a.kron(&b)
}

/// Convex mixture of `terms` random product states with Dirichlet-like weights.
pub fn random_separable_state<T: Real, R: Rng + ?Sized>(rng: &mut R, terms: usize) -> DensityMatrix<T> {
    let mut acc = CMatrix::<T>::zeros(4, 4);
    for _ in 0..terms.max(1) {
        let w: f64 = rng.random::<f64>() + 1e-3;
        acc += random_product_state::<T, R>(rng).into_matrix() * Complex::new(lit::<T>(w), T::zero());
    }
    DensityMatrix::from_unnormalized(acc).expect("mixture of states is a state")
}

/// Traceless Hermitian operator of unit Hilbert–Schmidt norm, isotropic in operator space.
pub fn random_traceless_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Observable<T> {
    let g = gaussian_matrix::<T, R>(rng, dim, dim);
    let h = linalg::hermitian_part(&g);
    Observable::new(h).expect("Hermitian by construction").traceless_part().normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_matrix() {
        let a = random_density_matrix::<f64>(4, 4, 7).unwrap();
        let b = random_density_matrix::<f64>(4, 4, 7).unwrap();
        assert_eq!(a, b);
        let c = random_density_matrix::<f64>(4, 4, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rank_one_is_pure() {
        let rho = random_density_matrix::<f64>(4, 1, 3).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_out_of_range() {
        assert!(matches!(random_density_matrix::<f64>(4, 5, 0), Err(Error::OutOfRange { .. })));
        assert!(matches!(random_density_matrix::<f64>(4, 0, 0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let u = haar_unitary::<f64, _>(&mut rng, 4);
            assert!(linalg::unitarity_error(&u) < 1e-12);
        }
    }

    #[test]
    fn traceless_direction_is_unit() {
        let mut rng = rng_from_seed(5);
        let r = random_traceless_hermitian::<f64, _>(&mut rng, 4);
        assert!(r.trace().abs() < 1e-14);
        assert!((r.hs_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
