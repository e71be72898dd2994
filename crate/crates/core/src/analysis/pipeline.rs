//! End-to-end processing of a trace set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    drift_crosscorr, lowpass, raw_overlap_peak, spectral_average, stage_to_delay, stitch_segments,
    zero_delay_phase_fit, AnalysisConfig, AveragedSpectrum, PeakPosition, PhaseFit, RawTraceSet, WavePlates,
    PEAK_SNR_FLOOR,
};
use crate::error::{Error, Result};
use crate::io::uniform_grid;
use crate::signal::SignalKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOutput {
    /// Delay grid of all traces [ps].
    pub delay_ps: Vec<f64>,
    /// Acquisition indices in each segment.
    pub segments: Vec<Vec<usize>>,
    /// Unfiltered and low-passed mean of each segment.
    pub segment_means: Vec<Vec<f64>>,
    pub segment_means_filtered: Vec<Vec<f64>>,
    /// Delay of each segment relative to the first [fs].
    pub drift_fs: Vec<f64>,
    pub stitched: Vec<f64>,
    pub averaged: AveragedSpectrum,
    pub phase_fit: PhaseFit,
    /// Raw-channel overlap peak per acquisition, where a raw channel exists
    /// and the peak clears the noise floor.
    pub raw_peaks: Vec<(usize, PeakPosition)>,
}

fn mean(rows: &[&Vec<f64>]) -> Vec<f64> {
    let n = rows[0].len();
    let mut m = vec![0.0; n];
    for r in rows {
        for (a, b) in m.iter_mut().zip(r.iter()) {
            *a += b;
        }
    }
    m.iter_mut().for_each(|v| *v /= rows.len() as f64);
    m
}

/// Runs filtering, drift estimation, stitching, phase-corrected averaging,
/// the zero-delay fit and raw-peak tracking.
///
/// `overlap_stage_mm` defines zero delay; acquisitions with index
/// `>= split_after` form a second segment whose drift relative to the first
/// is measured and removed.
pub fn analyze(
    set: &RawTraceSet,
    overlap_stage_mm: f64,
    split_after: Option<usize>,
    cfg: &AnalysisConfig,
) -> Result<AnalysisOutput> {
    set.validate()?;
    cfg.validate()?;
    let stage = &set.traces[0].stage_mm;
    if set.traces.iter().any(|t| &t.stage_mm != stage) {
        return Err(Error::GridMismatch("traces use different stage grids".into()));
    }
    let delay_ps: Vec<f64> = stage.iter().map(|s| stage_to_delay(s - overlap_stage_mm)).collect();
    let (t0, dt) = uniform_grid(&delay_ps).map_err(Error::GridMismatch)?;
    let step_fs = dt * 1e3;
    if (step_fs - cfg.sample_step_fs).abs() > 0.01 * cfg.sample_step_fs {
        log::warn!("stage grid step is {step_fs:.2} fs, configured sample step {} fs", cfg.sample_step_fs);
    }

    let filtered: Vec<Vec<f64>> = set
        .traces
        .par_iter()
        .map(|t| lowpass(&t.values, dt, cfg.lowpass_cutoff_thz))
        .collect();

    let split = split_after.unwrap_or(usize::MAX);
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
    for (k, t) in set.traces.iter().enumerate() {
        groups[usize::from(t.index >= split)].push(k);
    }
    groups.retain(|g| !g.is_empty());

    let segment_means: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| mean(&g.iter().map(|&k| &set.traces[k].values).collect::<Vec<_>>()))
        .collect();
    let segment_means_filtered: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| mean(&g.iter().map(|&k| &filtered[k]).collect::<Vec<_>>()))
        .collect();
    let mut drift_fs = vec![0.0];
    for m in &segment_means_filtered[1..] {
        drift_fs.push(drift_crosscorr(&segment_means_filtered[0], m, dt)?);
    }

    let weighted: Vec<(Vec<f64>, f64)> = segment_means
        .iter()
        .zip(&groups)
        .map(|(m, g)| (m.clone(), g.len() as f64))
        .collect();
    let undo: Vec<f64> = drift_fs.iter().map(|d| -d).collect();
    let stitched = stitch_segments(&weighted, &undo, step_fs)?;

    let mut delays = vec![0.0; set.traces.len()];
    for (g, d) in groups.iter().zip(&drift_fs) {
        for &k in g {
            delays[k] = -d * 1e-3;
        }
    }
    let values: Vec<Vec<f64>> = set.traces.iter().map(|t| t.values.clone()).collect();
    let kind = match set.wave_plates {
        WavePlates::QwpQwp => SignalKind::Vacuum,
        WavePlates::HwpQwp => SignalKind::Source,
    };
    let averaged = spectral_average(&values, t0, dt, &delays, cfg.uncertainty_halfwidth_fs, kind)?;
    let phase_fit = zero_delay_phase_fit(&averaged.spectrum, cfg.phase_fit_band_thz)?;

    let raw_peaks = set
        .traces
        .iter()
        .filter_map(|t| {
            let raw = t.raw.as_ref()?;
            match raw_overlap_peak(&t.stage_mm, raw, PEAK_SNR_FLOOR) {
                Ok(p) => Some((t.index, p)),
                Err(e) => {
                    log::warn!("trace {}: {e}", t.index);
                    None
                }
            }
        })
        .collect();

    Ok(AnalysisOutput {
        delay_ps,
        segments: groups.iter().map(|g| g.iter().map(|&k| set.traces[k].index).collect()).collect(),
        segment_means,
        segment_means_filtered,
        drift_fs,
        stitched,
        averaged,
        phase_fit,
        raw_peaks,
    })
}
