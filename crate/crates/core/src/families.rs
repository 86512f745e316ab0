//! Named states used across the toolkit.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::scalar::{lit, Real};
use crate::state::DensityMatrix;

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

/// `(|00> + |11>) / sqrt(2)`.
pub fn bell_phi_plus<T: Real>() -> Vec<Complex<T>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]
}

fn product_ket<T: Real>(a: [Complex<T>; 2], b: [Complex<T>; 2]) -> Vec<Complex<T>> {
    vec![a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// `(|0> − i|1>)(|0> + |1>) / 2`.
pub fn product_component_1<T: Real>() -> Vec<Complex<T>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    product_ket([c(h, 0.0), c(0.0, -h)], [c(h, 0.0), c(h, 0.0)])
}

/// `(|0> + |1>)(|0> − 2i|1>) / sqrt(10)`.
pub fn product_component_2<T: Real>() -> Vec<Complex<T>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let f = 1.0 / 5.0f64.sqrt();
    product_ket([c(h, 0.0), c(h, 0.0)], [c(f, 0.0), c(0.0, -2.0 * f)])
}

/// Bell-weighted input family:
/// `λ |φ_B><φ_B| + (1 − λ)(|φ_1><φ_1| + |φ_2><φ_2|) / 2`.
pub fn input_state<T: Real>(lambda: f64) -> Result<DensityMatrix<T>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::out_of_range("lambda", lambda, 0.0, 1.0));
    }
    let bell = linalg::projector(&bell_phi_plus::<T>());
    let p1 = linalg::projector(&product_component_1::<T>());
    let p2 = linalg::projector(&product_component_2::<T>());
    let w = c::<T>(lambda, 0.0);
    let half_rest = c::<T>((1.0 - lambda) / 2.0, 0.0);
    DensityMatrix::new(bell * w + (p1 + p2) * half_rest)
}

/// Computational basis ket `|index>` in dimension `dim`.
pub fn basis_ket<T: Real>(dim: usize, index: usize) -> Vec<Complex<T>> {
    (0..dim)
        .map(|k| if k == index { c(1.0, 0.0) } else { c(0.0, 0.0) })
        .collect()
}

/// Pseudo-pure state `(1 − ε)/dim · I + ε · pure`.
pub fn make_pps<T: Real>(epsilon: f64, pure: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::out_of_range("epsilon", epsilon, 0.0, 1.0));
    }
    let purity = crate::scalar::to_f64(pure.purity());
    if (purity - 1.0).abs() > crate::scalar::tolerance::<T>(1e-10) {
        return Err(Error::out_of_range("purity", purity, 1.0, 1.0));
    }
    let dim = pure.dim();
    let mixed: CMatrix<T> = linalg::identity::<T>(dim) * c::<T>((1.0 - epsilon) / dim as f64, 0.0);
    DensityMatrix::new(mixed + pure.matrix() * c::<T>(epsilon, 0.0))
}
