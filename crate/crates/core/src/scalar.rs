//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Real floating-point type the linear algebra is generic over (`f32` or `f64`).
///
/// Validation thresholds are stated in `f64` terms and widened through
/// [`tolerance`] when the scalar cannot resolve them.
pub trait Real: RealField + Copy + ToPrimitive {
    /// Machine epsilon of the type, widened to `f64`.
    const EPSILON: f64;
}

impl Real for f32 {
    const EPSILON: f64 = f32::EPSILON as f64;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

/// `base`, unless the scalar type is too coarse to resolve it.
#[inline]
pub fn tolerance<T: Real>(base: f64) -> f64 {
    base.max(64.0 * T::EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_widens_only_for_coarse_types() {
        assert_eq!(tolerance::<f64>(1e-12), 1e-12);
        assert!(tolerance::<f32>(1e-12) > 1e-6);
        assert_eq!(tolerance::<f32>(0.5), 0.5);
    }
}
