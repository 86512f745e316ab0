use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tomolab_core::entanglement::concurrence;
use tomolab_core::families::input_state;
use tomolab_core::random::derive_seed;

use crate::error::{HarnessError, Result};
use crate::noise::{noise_sample, NoiseModel, NOISE_METRIC};

pub const LAMBDA_MIN: f64 = 0.1;
pub const LAMBDA_MAX: f64 = 0.8;

/// Sample quantiles (linear interpolation between order statistics) plus the
/// sample envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn from_samples(mut values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "quantiles of an empty sample");
        values.sort_by(f64::total_cmp);
        let at = |p: f64| {
            let pos = p * (values.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            values[lo] + (pos - lo as f64) * (values[hi] - values[lo])
        };
        Quantiles {
            min: values[0],
            q05: at(0.05),
            q25: at(0.25),
            q50: at(0.5),
            q75: at(0.75),
            q95: at(0.95),
            max: values[values.len() - 1],
        }
    }

    /// Central 90% width.
    pub fn width(&self) -> f64 {
        self.q95 - self.q05
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.min..=self.max).contains(&x)
    }

    pub fn is_ordered(&self) -> bool {
        let q = [self.min, self.q05, self.q25, self.q50, self.q75, self.q95, self.max];
        q.windows(2).all(|w| w[0] <= w[1])
    }
}

/// `count` evenly spaced values over `[0.1, 0.8]`.
pub fn lambda_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![LAMBDA_MIN],
        n => (0..n)
            .map(|i| LAMBDA_MIN + (LAMBDA_MAX - LAMBDA_MIN) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRow {
    pub lambda: f64,
    pub concurrence_ideal: f64,
    pub concurrence_reconstructed: Option<f64>,
    pub fidelity: Option<f64>,
    pub band: Option<Quantiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub lambda_grid: Vec<f64>,
    pub rows: Vec<LambdaRow>,
    pub seed: u64,
    pub model: NoiseModel,
    /// Wall-clock seconds; kept out of written files so they stay reproducible.
    #[serde(skip)]
    pub runtime: f64,
}

#[derive(Serialize)]
struct CsvRow {
    lambda: f64,
    concurrence_ideal: f64,
    concurrence_reconstructed: Option<f64>,
    fidelity: Option<f64>,
    in_band: Option<bool>,
    band_min: Option<f64>,
    q05: Option<f64>,
    q25: Option<f64>,
    q50: Option<f64>,
    q75: Option<f64>,
    q95: Option<f64>,
    band_max: Option<f64>,
}

impl ExperimentReport {
    pub fn validate(&self) -> Result<()> {
        for row in &self.rows {
            if let Some(f) = row.fidelity {
                if !(0.0..=1.0).contains(&f) {
                    return Err(HarnessError::Config(format!("fidelity {f} at lambda {} outside [0, 1]", row.lambda)));
                }
            }
            if let Some(b) = row.band {
                if !b.is_ordered() {
                    return Err(HarnessError::Config(format!("unordered band at lambda {}", row.lambda)));
                }
            }
        }
        Ok(())
    }

    pub fn fidelities(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.fidelity).collect()
    }

    pub fn median_fidelity(&self) -> Option<f64> {
        let f = self.fidelities();
        (!f.is_empty()).then(|| Quantiles::from_samples(f).q50)
    }

    /// `#`-prefixed header lines followed by one CSV row per λ.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let c = self.model.components;
        let header = format!(
            "# noise_metric={NOISE_METRIC}\n# noise_total={} fitting={} gate={} decoherence={}\n# seed={}\n",
            self.model.total, c.fitting, c.gate, c.decoherence, self.seed
        );
        out.write_all(header.as_bytes()).map_err(|e| HarnessError::io("<report>", e))?;
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            let b = row.band;
            w.serialize(CsvRow {
                lambda: row.lambda,
                concurrence_ideal: row.concurrence_ideal,
                concurrence_reconstructed: row.concurrence_reconstructed,
                fidelity: row.fidelity,
                in_band: b.zip(row.concurrence_reconstructed).map(|(b, c)| b.contains(c)),
                band_min: b.map(|b| b.min),
                q05: b.map(|b| b.q05),
                q25: b.map(|b| b.q25),
                q50: b.map(|b| b.q50),
                q75: b.map(|b| b.q75),
                q95: b.map(|b| b.q95),
                band_max: b.map(|b| b.max),
            })?;
        }
        w.flush().map_err(|e| HarnessError::io("<report>", e))?;
        Ok(())
    }
}

/// Concurrence quantiles of `samples` noisy copies of `input_state(lambda)`.
pub fn band_at(lambda: f64, samples: usize, model: &NoiseModel, seed: u64) -> Result<Quantiles> {
    if samples == 0 {
        return Err(HarnessError::Config("samples per lambda must be at least 1".into()));
    }
    let rho = input_state::<f64>(lambda).map_err(HarnessError::at_lambda(lambda))?;
    let values = (0..samples as u64)
        .map(|k| {
            let s = noise_sample(&rho, model, derive_seed(seed, k))?;
            Ok(concurrence(&s).map_err(HarnessError::at_lambda(lambda))?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Quantiles::from_samples(values))
}

/// Noise band of the input family over `lambda_count` points of `[0.1, 0.8]`.
pub fn concurrence_band(lambda_count: usize, samples_per_lambda: usize, model: &NoiseModel, seed: u64) -> Result<ExperimentReport> {
    if lambda_count == 0 {
        return Err(HarnessError::Config("lambda count must be at least 1".into()));
    }
    model.validate()?;
    let start = std::time::Instant::now();
    let grid = lambda_grid(lambda_count);
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let ideal = concurrence(&input_state::<f64>(lambda).map_err(HarnessError::at_lambda(lambda))?)
                .map_err(HarnessError::at_lambda(lambda))?
                .value;
            Ok(LambdaRow {
                lambda,
                concurrence_ideal: ideal,
                concurrence_reconstructed: None,
                fidelity: None,
                band: Some(band_at(lambda, samples_per_lambda, model, derive_seed(seed, i as u64))?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = ExperimentReport {
        lambda_grid: grid,
        rows,
        seed,
        model: *model,
        runtime: start.elapsed().as_secs_f64(),
    };
    report.validate()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let q = Quantiles::from_samples((0..=100).map(f64::from).collect());
        assert_eq!((q.min, q.q05, q.q50, q.q95, q.max), (0.0, 5.0, 50.0, 95.0, 100.0));
        let single = Quantiles::from_samples(vec![0.3]);
        assert_eq!(single.width(), 0.0);
    }

    #[test]
    fn grid_endpoints() {
        let g = lambda_grid(200);
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 0.1);
        assert!((g[199] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_band_collapses() {
        let report = concurrence_band(10, 50, &NoiseModel::zero(), 1).unwrap();
        for row in &report.rows {
            let b = row.band.unwrap();
            assert!(b.max - b.min < 1e-10);
            assert!((b.q50 - row.concurrence_ideal).abs() < 1e-10);
        }
    }
}
