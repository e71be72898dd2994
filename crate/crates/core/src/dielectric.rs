//! THz permittivity and refractive index of the electro-optic crystal.
//!
//! Single Lorentz oscillator in ordinary frequency:
//!
//! ```text
//! ε(f) = ε∞ (1 + (f_LO² − f_TO²) / (f_TO² − f² − i f γ))
//! ```
//!
//! with `f`, `f_TO`, `f_LO` and the linewidth `γ` all in THz.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter file shipped with the crate; the source of all crystal defaults.
pub const DEFAULT_CRYSTAL_FILE: &str = include_str!("../../../params/znte.params");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DielectricModel {
    pub eps_inf: f64,
    #[serde(rename = "f_TO_THz")]
    pub f_to: f64,
    #[serde(rename = "f_LO_THz")]
    pub f_lo: f64,
    #[serde(rename = "gamma_THz")]
    pub gamma: f64,
    pub n_g: f64,
    /// Only used by the optional thermal factor.
    #[serde(rename = "temperature_K")]
    pub temperature: f64,
}

/// Contents of a crystal parameter file: the dielectric model plus the
/// crystal length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrystalParams {
    #[serde(flatten)]
    pub dielectric: DielectricModel,
    pub length_um: f64,
}

impl CrystalParams {
    pub fn parse(text: &str) -> Result<Self> {
        let p: CrystalParams = toml::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("crystal parameters: {e}")))?;
        p.dielectric.validate()?;
        if !(p.length_um > 0.0) {
            return Err(Error::InvalidParameter("length_um must be > 0".into()));
        }
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::parse(&text).map_err(|e| Error::file(path, e))
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("crystal parameters serialize")
    }
}

impl Default for CrystalParams {
    fn default() -> Self {
        CrystalParams::parse(DEFAULT_CRYSTAL_FILE).expect("bundled crystal file is valid")
    }
}

impl Default for DielectricModel {
    fn default() -> Self {
        CrystalParams::default().dielectric
    }
}

impl DielectricModel {
    pub fn validate(&self) -> Result<()> {
        let ok = self.eps_inf > 0.0
            && self.f_to > 0.0
            && self.f_lo > self.f_to
            && self.gamma >= 0.0
            && self.n_g > 1.0
            && self.temperature >= 0.0;
        if ok && [self.eps_inf, self.f_to, self.f_lo, self.gamma, self.n_g, self.temperature]
            .iter()
            .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "dielectric model violates eps_inf > 0, f_LO > f_TO > 0, gamma >= 0, n_g > 1: {self:?}"
            )))
        }
    }

    /// Lossless copy of the model (`γ = 0`).
    pub fn lossless(&self) -> Self {
        DielectricModel { gamma: 0.0, ..*self }
    }

    pub fn permittivity(&self, f: f64) -> Result<Complex64> {
        if !f.is_finite() {
            return Err(Error::NonFinite("frequency"));
        }
        Ok(self.eps(f))
    }

    /// Refractive index with `Im n >= 0` for `f > 0` and `n(-f) = n(f)*`.
    pub fn refractive_index(&self, f: f64) -> Result<Complex64> {
        if !f.is_finite() {
            return Err(Error::NonFinite("frequency"));
        }
        Ok(self.n(f))
    }

    pub(crate) fn eps(&self, f: f64) -> Complex64 {
        let strength = self.f_lo * self.f_lo - self.f_to * self.f_to;
        let denom = Complex64::new(self.f_to * self.f_to - f * f, -f * self.gamma);
        self.eps_inf * (1.0 + strength / denom)
    }

    pub(crate) fn n(&self, f: f64) -> Complex64 {
        let fa = f.abs();
        let mut eps = self.eps(fa);
        // pin the sign of a vanishing imaginary part so the branch is defined
        if eps.im == 0.0 {
            eps.im = 0.0;
        }
        let mut n = eps.sqrt();
        if n.im < 0.0 {
            n = -n;
        }
        if f < 0.0 {
            n.conj()
        } else {
            n
        }
    }

    /// Static permittivity `ε∞ (f_LO / f_TO)²`.
    pub fn static_permittivity(&self) -> f64 {
        self.eps_inf * (self.f_lo / self.f_to).powi(2)
    }
}
