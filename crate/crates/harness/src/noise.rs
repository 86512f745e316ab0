use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use tomolab_core::metrics::trace_distance;
use tomolab_core::random::{random_density_matrix_with, rng_from_seed};
use tomolab_core::DensityMatrix;

use crate::error::{HarnessError, Result};

/// Distance used for every noise radius in this crate.
pub const NOISE_METRIC: &str = "trace_distance";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseComponents {
    pub fitting: f64,
    pub gate: f64,
    pub decoherence: f64,
}

impl NoiseComponents {
    pub fn sum(&self) -> f64 {
        self.fitting + self.gate + self.decoherence
    }
}

/// Error budget as a trace-distance radius around the ideal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub total: f64,
    pub components: NoiseComponents,
}

const DEFAULT_COMPONENTS: NoiseComponents = NoiseComponents {
    fitting: 0.0300,
    gate: 0.0159,
    decoherence: 0.0120,
};

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            total: 0.0579,
            components: DEFAULT_COMPONENTS,
        }
    }
}

impl NoiseModel {
    pub fn zero() -> Self {
        Self::scaled(0.0)
    }

    /// The default budget rescaled to `total`, component ratios kept.
    pub fn scaled(total: f64) -> Self {
        let f = total / DEFAULT_COMPONENTS.sum();
        NoiseModel {
            total,
            components: NoiseComponents {
                fitting: DEFAULT_COMPONENTS.fitting * f,
                gate: DEFAULT_COMPONENTS.gate * f,
                decoherence: DEFAULT_COMPONENTS.decoherence * f,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.components;
        for (name, v) in [
            ("total", self.total),
            ("fitting", c.fitting),
            ("gate", c.gate),
            ("decoherence", c.decoherence),
        ] {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(HarnessError::Config(format!("noise {name} = {v} is outside [0, 1]")));
            }
        }
        if (c.sum() - self.total).abs() > 1e-6 {
            return Err(HarnessError::Config(format!(
                "noise components sum to {} but total is {}",
                c.sum(),
                self.total
            )));
        }
        Ok(())
    }
}

/// `σ = (1 − δ)ρ + δτ` with `τ` Hilbert–Schmidt random and `‖σ − ρ‖_tr ≤ radius`.
///
/// Drawing `δ` uniformly on `[0, 1]` and rejecting points outside the ball is
/// the same as drawing it uniformly on `[0, min(1, radius / ‖τ − ρ‖_tr)]`,
/// which is what happens here.
pub fn perturb<R: Rng + ?Sized>(
    rho: &DensityMatrix<f64>,
    radius: f64,
    rng: &mut R,
) -> tomolab_core::Result<DensityMatrix<f64>> {
    if radius <= 0.0 {
        return Ok(rho.clone());
    }
    let tau = random_density_matrix_with::<f64, R>(rng, rho.dim(), rho.dim())?;
    let d = trace_distance(rho, &tau)?;
    let reach = if d > 0.0 { (radius / d).min(1.0) } else { 1.0 };
    let delta = rng.random_range(0.0..=reach);
    DensityMatrix::new(rho.matrix() * Complex::new(1.0 - delta, 0.0) + tau.matrix() * Complex::new(delta, 0.0))
}

/// One state within `model.total` of `rho`.
pub fn noise_sample(rho: &DensityMatrix<f64>, model: &NoiseModel, seed: u64) -> Result<DensityMatrix<f64>> {
    model.validate()?;
    Ok(perturb(rho, model.total, &mut rng_from_seed(seed))?)
}
