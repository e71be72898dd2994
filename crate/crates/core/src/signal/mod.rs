//! Vacuum and source electro-optic correlation signals.
//!
//! Both signals are computed in the frequency domain. The two pulse time
//! integrals are done analytically ([`time_reduce`]), the transverse
//! integrals in the Weyl plane, and the longitudinal double integral over the
//! crystal in closed form ([`longitudinal`]). The traces follow as
//!
//! ```text
//! G(δt) = ∫ dΩ S(Ω) e^{-iΩδt}
//! ```
//!
//! where positive `δt` means the probe (pulse 1) arrives after the source
//! (pulse 2).

mod envelope;
mod kernel;
mod oracle;
mod trace;

use serde::{Deserialize, Serialize};

use crate::dielectric::{CrystalParams, DielectricModel};
use crate::error::{Error, Result};

pub use envelope::{pulse_envelope, time_reduce, Pulse, TimeReduction};
pub use kernel::{
    longitudinal, spectral_kernel_src, spectral_kernel_vac, spectral_kernels, KPlaneQuadrature,
    SpectralSample,
};
pub use oracle::{brute_force_oracle, relative_rms, OracleConfig, OracleResult, ORACLE_MAX_LENGTH_UM};
pub use trace::{sweep_beam_distance, trace, trace_pair, zero_crossing, FrequencyGrid, TraceOutput};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGeometry {
    /// Intensity FWHM of each pulse [fs].
    pub tau_fwhm_fs: f64,
    /// Gaussian beam waist [µm].
    pub w_um: f64,
    /// Beam separation along x [µm].
    pub delta_r_um: f64,
    /// Crystal length [µm].
    pub length_um: f64,
    pub dielectric: DielectricModel,
    pub temperature_k: f64,
    /// Apply `coth(hf/2k_BT)` to the vacuum spectrum.
    #[serde(default)]
    pub thermal: bool,
}

impl ExperimentGeometry {
    pub fn new(crystal: &CrystalParams, tau_fwhm_fs: f64, w_um: f64, delta_r_um: f64) -> Result<Self> {
        let g = ExperimentGeometry {
            tau_fwhm_fs,
            w_um,
            delta_r_um,
            length_um: crystal.length_um,
            dielectric: crystal.dielectric,
            temperature_k: crystal.dielectric.temperature,
            thermal: false,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau_fwhm_fs", self.tau_fwhm_fs),
            ("w_um", self.w_um),
            ("length_um", self.length_um),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.delta_r_um >= 0.0) || !self.delta_r_um.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta_r_um must be >= 0, got {}",
                self.delta_r_um
            )));
        }
        if !(self.temperature_k >= 0.0) {
            return Err(Error::InvalidParameter("temperature_K must be >= 0".into()));
        }
        self.dielectric.validate()
    }

    /// Envelope parameter `τ_σ` [ps] of `e^{-2t²/τ_σ²}`, matched to the
    /// intensity FWHM.
    pub fn tau_sigma_ps(&self) -> f64 {
        self.tau_fwhm_fs / crate::units::FS_PER_PS / std::f64::consts::LN_2.sqrt()
    }

    pub fn with_delta_r(&self, delta_r_um: f64) -> Self {
        ExperimentGeometry { delta_r_um, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Vacuum,
    Source,
}

impl SignalKind {
    pub fn name(self) -> &'static str {
        match self {
            SignalKind::Vacuum => "vacuum",
            SignalKind::Source => "source",
        }
    }
}

/// Real trace on a uniform delay grid `t0 + j dt` [ps].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeTrace {
    pub kind: SignalKind,
    pub t0_ps: f64,
    pub dt_ps: f64,
    pub values: Vec<f64>,
}

impl TimeTrace {
    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|j| self.t0_ps + j as f64 * self.dt_ps).collect()
    }

    pub fn peak_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Two-sided spectrum on the centred grid `f0 + k df` [THz].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpectrum {
    pub kind: SignalKind,
    pub f0_thz: f64,
    pub df_thz: f64,
    pub values: Vec<num_complex::Complex64>,
}

impl ComplexSpectrum {
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| self.f0_thz + k as f64 * self.df_thz).collect()
    }

    /// Same grid as `other` to within rounding.
    pub fn same_grid(&self, other: &ComplexSpectrum) -> bool {
        self.values.len() == other.values.len()
            && (self.f0_thz - other.f0_thz).abs() <= 1e-9 * self.df_thz
            && (self.df_thz - other.df_thz).abs() <= 1e-12 * self.df_thz
    }

    /// Index of the frequency nearest to `f`, if on the grid.
    pub fn index_of(&self, f: f64) -> Option<usize> {
        let k = ((f - self.f0_thz) / self.df_thz).round();
        (k >= 0.0 && (k as usize) < self.values.len()).then_some(k as usize)
    }
}
