//! Distances between states.

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{to_f64, tolerance, Real};
use crate::state::{expect_dim, DensityMatrix, PSD_TOL};

/// Uhlmann fidelity `(tr sqrt(sqrt(ρ) σ sqrt(ρ)))^2`, in `[0, 1]`.
pub fn fidelity<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    expect_dim(rho.dim(), sigma.dim())?;
    let s = linalg::sqrt_psd(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let values = linalg::hermitian_eigenvalues(&inner);
    let min = to_f64(values[0]);
    if min < -tolerance::<T>(PSD_TOL) {
        return Err(Error::NotPositive(min));
    }
    let root_trace = linalg::sqrt_spectrum(&values)
        .into_iter()
        .fold(T::zero(), |acc, v| acc + v);
    Ok((root_trace * root_trace).min(T::one()))
}

/// Trace distance `‖ρ − σ‖₁ / 2`.
pub fn trace_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    expect_dim(rho.dim(), sigma.dim())?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(linalg::trace_norm_hermitian(&diff) * crate::scalar::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, random_density_matrix, rng_from_seed};
    use crate::scalar::cplx;

    #[test]
    fn fidelity_basics() {
        let zero = DensityMatrix::<f64>::from_pure(&[cplx(1.0, 0.0), cplx(0.0, 0.0)]).unwrap();
        let one = DensityMatrix::<f64>::from_pure(&[cplx(0.0, 0.0), cplx(1.0, 0.0)]).unwrap();
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-12);
        assert!((fidelity(&mixed, &zero).unwrap() - 0.5).abs() < 1e-12);
        assert!((fidelity(&zero, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn commuting_states_reduce_to_bhattacharyya() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let q = [0.4, 0.3, 0.2, 0.1];
        let diag = |v: &[f64]| {
            DensityMatrix::<f64>::new(linalg::CMatrix::from_fn(4, 4, |r, c| {
                if r == c { cplx(v[r], 0.0) } else { cplx(0.0, 0.0) }
            }))
            .unwrap()
        };
        let b: f64 = p.iter().zip(q).map(|(a, b)| (a * b as f64).sqrt()).sum();
        assert!((fidelity(&diag(&p), &diag(&q)).unwrap() - b * b).abs() < 1e-12);
    }

    #[test]
    fn fidelity_symmetric_and_unitarily_invariant() {
        let mut rng = rng_from_seed(9);
        for s in 0..50 {
            let rho = random_density_matrix::<f64>(4, 4, 2 * s).unwrap();
            let sigma = random_density_matrix::<f64>(4, 3, 2 * s + 1).unwrap();
            let f = fidelity(&rho, &sigma).unwrap();
            assert!((f - fidelity(&sigma, &rho).unwrap()).abs() < 1e-10);
            let u = haar_unitary::<f64, _>(&mut rng, 4);
            let f2 = fidelity(&rho.conjugate(&u).unwrap(), &sigma.conjugate(&u).unwrap()).unwrap();
            assert!((f - f2).abs() < 1e-10);
        }
    }

    #[test]
    fn mismatched_dims() {
        let a = DensityMatrix::<f64>::maximally_mixed(2);
        let b = DensityMatrix::<f64>::maximally_mixed(4);
        assert!(matches!(fidelity(&a, &b), Err(Error::DimensionMismatch { .. })));
    }
}
