use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::C_UM_PER_PS;

/// Optical delay [ps] of a stage displacement [mm] on a double-pass line.
pub fn stage_to_delay(delta_stage_mm: f64) -> f64 {
    2.0 * delta_stage_mm * 1e3 / C_UM_PER_PS
}

/// Inverse of [`stage_to_delay`].
pub fn delay_to_stage(delta_t_ps: f64) -> f64 {
    delta_t_ps * C_UM_PER_PS / 2.0 / 1e3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    Sech2,
    Gauss,
}

impl PulseShape {
    /// Ratio of intensity-autocorrelation FWHM to pulse FWHM.
    pub fn deconvolution_factor(self) -> f64 {
        match self {
            PulseShape::Sech2 => 1.543,
            PulseShape::Gauss => std::f64::consts::SQRT_2,
        }
    }
}

impl FromStr for PulseShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sech2" | "sech²" => Ok(PulseShape::Sech2),
            "gauss" | "gaussian" => Ok(PulseShape::Gauss),
            _ => Err(Error::InvalidParameter(format!("unknown pulse shape `{s}` (sech2 or gauss)"))),
        }
    }
}

/// Pulse intensity FWHM [fs] from an intensity-autocorrelation FWHM [fs].
pub fn autocorr_to_pulsewidth(ac_fwhm_fs: f64, shape: PulseShape) -> Result<f64> {
    if !(ac_fwhm_fs > 0.0) || !ac_fwhm_fs.is_finite() {
        return Err(Error::InvalidParameter(format!("autocorrelation width must be > 0, got {ac_fwhm_fs}")));
    }
    Ok(ac_fwhm_fs / shape.deconvolution_factor())
}
