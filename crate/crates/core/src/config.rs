//! Run configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{AnalysisConfig, SynthConfig};
use crate::dielectric::CrystalParams;
use crate::error::{Error, Result};
use crate::signal::{ExperimentGeometry, FrequencyGrid, KPlaneQuadrature, OracleConfig};

/// Run configuration shipped with the crate; the source of all run defaults.
pub const DEFAULT_RUN_FILE: &str = include_str!("../../../params/run_default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub tau_fwhm_fs: f64,
    pub w_um: f64,
    pub delta_r_um: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_um: Option<f64>,
    #[serde(default, rename = "temperature_K", skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(rename = "f_max_THz")]
    pub f_max_thz: f64,
    pub n_freq: usize,
    pub kplane_panels: usize,
    pub kplane_rel_tol: f64,
    /// Half-width of the plotted delay window [ps].
    pub dt_window_ps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdtConfig {
    #[serde(rename = "band_THz")]
    pub band_thz: [f64; 2],
    pub pointwise_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub distances_um: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Crystal parameter file, relative to the configuration file. Absent
    /// means the bundled crystal file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crystal_file: Option<PathBuf>,
    pub seed: u64,
    pub thermal: bool,
    /// Multiplies written traces and spectra.
    pub calibration: f64,
    pub geometry: GeometryConfig,
    pub grid: GridConfig,
    pub fdt: FdtConfig,
    pub sweep: SweepConfig,
    pub oracle: OracleConfig,
    pub analysis: AnalysisConfig,
    pub synth: SynthConfig,
    #[serde(skip)]
    base_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut c = RunConfig::parse(DEFAULT_RUN_FILE).expect("bundled run configuration is valid");
        c.crystal_file = None;
        c
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let c: RunConfig =
            toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("run configuration: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut c = Self::parse(&text).map_err(|e| Error::file(path, e))?;
        c.base_dir = path.parent().map(Path::to_path_buf);
        if let Some(f) = c.crystal_path() {
            if !f.exists() {
                return Err(Error::file(path, format!("crystal file {} does not exist", f.display())));
            }
        }
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.frequency_grid().validate()?;
        if self.grid.kplane_panels == 0 || !(self.grid.kplane_rel_tol > 0.0) {
            return Err(Error::InvalidParameter("k-plane panels and tolerance must be positive".into()));
        }
        if !(self.calibration.is_finite() && self.calibration != 0.0) {
            return Err(Error::InvalidParameter("calibration must be finite and nonzero".into()));
        }
        let [lo, hi] = self.fdt.band_thz;
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidParameter("fdt band must be increasing".into()));
        }
        self.analysis.validate()
    }

    fn crystal_path(&self) -> Option<PathBuf> {
        let f = self.crystal_file.as_ref()?;
        Some(match &self.base_dir {
            Some(b) if f.is_relative() => b.join(f),
            _ => f.clone(),
        })
    }

    pub fn crystal(&self) -> Result<CrystalParams> {
        match self.crystal_path() {
            Some(p) => CrystalParams::load(&p),
            None => Ok(CrystalParams::default()),
        }
    }

    pub fn geometry(&self) -> Result<ExperimentGeometry> {
        let crystal = self.crystal()?;
        let g = &self.geometry;
        let mut geom = ExperimentGeometry::new(&crystal, g.tau_fwhm_fs, g.w_um, g.delta_r_um)?;
        if let Some(l) = g.length_um {
            geom.length_um = l;
        }
        if let Some(t) = g.temperature_k {
            geom.temperature_k = t;
        }
        geom.thermal = self.thermal;
        geom.validate()?;
        Ok(geom)
    }

    pub fn frequency_grid(&self) -> FrequencyGrid {
        FrequencyGrid {
            f_max_thz: self.grid.f_max_thz,
            n_freq: self.grid.n_freq,
        }
    }

    pub fn kplane(&self) -> KPlaneQuadrature {
        KPlaneQuadrature {
            radial_panels: self.grid.kplane_panels,
            rel_tol: self.grid.kplane_rel_tol,
            ..KPlaneQuadrature::default()
        }
    }
}
