//! Processing of measured or synthetic correlation traces: delay
//! calibration, filtering, zero-delay and drift estimation, stitching,
//! phase-corrected spectral averaging and pulse-width deconvolution.
//!
//! Shift sign convention: a trace delayed by `τ > 0` is `g(t − τ)`, its
//! spectrum picks up `e^{iΩτ}`, and all estimators report `τ`.

mod average;
mod delay;
mod drift;
mod filter;
mod manifest;
mod phase;
mod pipeline;
mod synth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use average::{spectral_average, stitch_segments, AveragedSpectrum};
pub use delay::{autocorr_to_pulsewidth, delay_to_stage, stage_to_delay, PulseShape};
pub use drift::{drift_crosscorr, raw_overlap_peak, PeakPosition, PEAK_SNR_FLOOR};
pub use filter::lowpass;
pub use manifest::{load_manifest, write_trace_set, Manifest, ManifestTrace};
pub use phase::{zero_delay_phase_fit, PhaseFit};
pub use pipeline::{analyze, AnalysisOutput};
pub use synth::{synthesize_traces, GroundTruth, SynthConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WavePlates {
    /// Quarter-wave plates in both detection lines: vacuum correlation.
    #[serde(rename = "QWP/QWP")]
    QwpQwp,
    /// Half-wave plate for the source pulse: source correlation.
    #[serde(rename = "HWP/QWP")]
    HwpQwp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Referencing {
    Raw,
    RfReferenced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTrace {
    /// Acquisition index.
    pub index: usize,
    pub stage_mm: Vec<f64>,
    pub values: Vec<f64>,
    /// Companion channel recorded without RF referencing, if available.
    pub raw: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTraceSet {
    pub wave_plates: WavePlates,
    /// Referencing of `values`.
    pub referencing: Referencing,
    pub traces: Vec<RawTrace>,
}

impl RawTraceSet {
    pub fn validate(&self) -> Result<()> {
        let first = self
            .traces
            .first()
            .ok_or_else(|| Error::InvalidParameter("trace set is empty".into()))?;
        let n = first.stage_mm.len();
        for (k, t) in self.traces.iter().enumerate() {
            if t.stage_mm.len() != n || t.values.len() != n || t.raw.as_ref().is_some_and(|r| r.len() != n) {
                return Err(Error::GridMismatch(format!("trace {} has a different length", t.index)));
            }
            if k > 0 && t.index <= self.traces[k - 1].index {
                return Err(Error::InvalidParameter(format!(
                    "acquisition indices must be unique and increasing (at {})",
                    t.index
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    #[serde(rename = "lowpass_cutoff_THz")]
    pub lowpass_cutoff_thz: f64,
    #[serde(rename = "phase_fit_band_THz")]
    pub phase_fit_band_thz: [f64; 2],
    pub sample_step_fs: f64,
    pub uncertainty_halfwidth_fs: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        crate::config::RunConfig::default().analysis
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.phase_fit_band_thz;
        if !(lo > 0.0 && hi > lo && hi < self.lowpass_cutoff_thz) {
            return Err(Error::InvalidParameter(format!(
                "phase fit band {lo}-{hi} THz must lie inside (0, {}) THz",
                self.lowpass_cutoff_thz
            )));
        }
        if !(self.sample_step_fs > 0.0) || !(self.uncertainty_halfwidth_fs >= 0.0) {
            return Err(Error::InvalidParameter("sample step and uncertainty must be positive".into()));
        }
        if self.uncertainty_halfwidth_fs > 0.505 * self.sample_step_fs {
            return Err(Error::InvalidParameter(format!(
                "uncertainty half-width {} fs exceeds half the sample step {} fs",
                self.uncertainty_halfwidth_fs, self.sample_step_fs
            )));
        }
        Ok(())
    }
}
