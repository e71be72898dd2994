//! Pulse envelopes and their analytic time integrals.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::ExperimentGeometry;
use crate::correlators::Vec3;
use crate::units::{angular, C_UM_PER_PS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pulse {
    /// Pulse 1, the detecting pulse (quarter-wave plate).
    Probe,
    /// Pulse 2, the source pulse (half-wave plate in the source measurement).
    Source,
}

/// `L_p(r, t)`, with `L₁(r, t) = L₂(r − δr eₓ, t − δt) =
/// (2/π)^{3/2} e^{-2(t − n_g z/c)²/τ_σ²} e^{-2(x² + y²)/w²}`.
pub fn pulse_envelope(geom: &ExperimentGeometry, pulse: Pulse, r: Vec3, t: f64, delta_t: f64) -> f64 {
    let (x, t) = match pulse {
        Pulse::Probe => (r[0], t),
        Pulse::Source => (r[0] + geom.delta_r_um, t + delta_t),
    };
    let tau = geom.tau_sigma_ps();
    let w = geom.w_um;
    let lag = t - geom.dielectric.n_g * r[2] / C_UM_PER_PS;
    (2.0 / PI).powf(1.5) * (-2.0 * lag * lag / (tau * tau)).exp() * (-2.0 * (x * x + r[1] * r[1]) / (w * w)).exp()
}

/// Result of `∫dt e^{-2(t − n_g z/c)²/τ_σ²} e^{iΩt} = weight · e^{i phase_rate z}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeReduction {
    /// `τ_σ √(π/2) e^{-Ω²τ_σ²/8}`.
    pub weight: f64,
    /// `Ω n_g / c` [rad/µm].
    pub phase_rate: f64,
}

impl TimeReduction {
    pub fn at(&self, z: f64) -> Complex64 {
        Complex64::from_polar(self.weight, self.phase_rate * z)
    }
}

pub fn time_reduce(geom: &ExperimentGeometry, f: f64) -> TimeReduction {
    let tau = geom.tau_sigma_ps();
    let w = angular(f);
    TimeReduction {
        weight: tau * (PI / 2.0).sqrt() * (-w * w * tau * tau / 8.0).exp(),
        phase_rate: w * geom.dielectric.n_g / C_UM_PER_PS,
    }
}
