//! Pulse-level checks for the ancilla gate: J-coupling evolution times and
//! the RF/ZZ decomposition of the controlled rotation.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::ancilla_unitary;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::optim::{nelder_mead, NelderMeadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PulseLayout {
    Normal,
    /// `τ2 < 0`: the two refocusing blocks trade places.
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseTimings {
    pub tau1: f64,
    pub tau2: f64,
    pub layout: PulseLayout,
}

/// Free-evolution times for simultaneous filters driven by couplings
/// `J_1A` (ancilla 1 to A) and `J_B2` (B to ancilla 2), in Hz.
pub fn pulse_timings(theta1: f64, theta2: f64, j_1a: f64, j_b2: f64) -> Result<PulseTimings> {
    if j_1a == 0.0 {
        return Err(Error::ZeroCoupling("J_1A"));
    }
    if j_b2 == 0.0 {
        return Err(Error::ZeroCoupling("J_B2"));
    }
    let pi = std::f64::consts::PI;
    let tau1 = theta1 / (4.0 * pi * j_1a) + theta2 / (4.0 * pi * j_b2);
    let tau2 = theta1 / (2.0 * pi * j_1a) - theta2 / (2.0 * pi * j_b2);
    let layout = if tau2 < 0.0 { PulseLayout::Swapped } else { PulseLayout::Normal };
    Ok(PulseTimings { tau1, tau2, layout })
}

/// Angle convention of the coupling evolution `exp(−i·c·θ·Z⊗Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ZzConvention {
    /// `c = 1/4`.
    #[default]
    Quarter,
    /// `c = 1/2`.
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDecompositionReport {
    pub gamma: f64,
    pub theta: f64,
    pub convention: ZzConvention,
    /// Frobenius distance to the target after fitting only a global phase.
    pub residual_before_z: f64,
    /// Distance after also fitting tail Z rotations on both qubits.
    pub residual: f64,
    /// Tail `R_z` angles on (ancilla, system).
    pub z_angles: [f64; 2],
    pub global_phase: f64,
}

/// `R_{−x}(π/2) · exp(−i·c·θ·Z⊗Z) · R_x(π/2) · R_{−y}(θ/2)` on (ancilla, system).
pub fn pulse_sequence(theta: f64, convention: ZzConvention) -> CMatrix<f64> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let id = linalg::identity::<f64>(2);
    let on_ancilla = |g: CMatrix<f64>| linalg::kron(&g, &id);
    let c = match convention {
        ZzConvention::Quarter => 0.25,
        ZzConvention::Half => 0.5,
    };
    let mut zz = CMatrix::<f64>::zeros(4, 4);
    for (i, sign) in [1.0, -1.0, -1.0, 1.0].into_iter().enumerate() {
        zz[(i, i)] = Complex::from_polar(1.0, -c * theta * sign);
    }
    on_ancilla(linalg::rotation(1, -half_pi))
        * zz
        * on_ancilla(linalg::rotation(1, half_pi))
        * on_ancilla(linalg::rotation(2, -theta / 2.0))
}

fn phase_fit(target: &CMatrix<f64>, got: &CMatrix<f64>) -> (f64, f64) {
    let overlap = (got.adjoint() * target).trace();
    let phase = overlap.arg();
    let residual = (target - got * Complex::from_polar(1.0, phase)).norm();
    (residual, phase)
}

fn tail(z: &[f64], seq: &CMatrix<f64>) -> CMatrix<f64> {
    linalg::kron(&linalg::rotation(3, z[0]), &linalg::rotation(3, z[1])) * seq
}

/// Compares the pulse sequence with the ancilla gate for `gamma`, searching
/// numerically for the best tail Z rotations.
pub fn verify_gate_decomposition(gamma: f64, convention: ZzConvention) -> Result<GateDecompositionReport> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::out_of_range("gamma", gamma, 0.0, 1.0));
    }
    let target = ancilla_unitary(gamma)?;
    let theta = 2.0 * (1.0 - gamma).sqrt().acos();
    let seq = pulse_sequence(theta, convention);
    let (residual_before_z, _) = phase_fit(&target, &seq);

    // Squared phase-optimal distance ‖A‖² + ‖B‖² − 2|tr A†B| is smooth in the angles.
    let objective = |z: &[f64]| {
        let got = tail(z, &seq);
        8.0 - 2.0 * (got.adjoint() * &target).trace().norm()
    };
    let grid = 24;
    let step = 2.0 * std::f64::consts::TAU / grid as f64;
    let mut best = ([0.0, 0.0], objective(&[0.0, 0.0]));
    for i in 0..grid {
        for j in 0..grid {
            let z = [i as f64 * step, j as f64 * step];
            let v = objective(&z);
            if v < best.1 {
                best = (z, v);
            }
        }
    }
    let polished = nelder_mead(
        objective,
        &best.0,
        NelderMeadOptions {
            initial_step: step / 4.0,
            ..NelderMeadOptions::default()
        },
    );
    let (mut residual, mut global_phase) = phase_fit(&target, &tail(&polished.x, &seq));
    let mut z_angles = [polished.x[0], polished.x[1]];
    let (r0, p0) = phase_fit(&target, &seq);
    if r0 <= residual {
        residual = r0;
        global_phase = p0;
        z_angles = [0.0, 0.0];
    }
    Ok(GateDecompositionReport {
        gamma,
        theta,
        convention,
        residual_before_z,
        residual,
        z_angles,
        global_phase,
    })
}
