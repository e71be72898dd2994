use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{delay_to_stage, stage_to_delay, RawTrace, RawTraceSet, Referencing, WavePlates};
use crate::error::{Error, Result};
use crate::numerics::spline::CubicSpline;
use crate::signal::TimeTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_traces: usize,
    pub stage_center_mm: f64,
    pub stage_step_mm: f64,
    pub n_stage: usize,
    /// White noise standard deviation relative to the template peak.
    pub noise_rel: f64,
    /// Slow additive drift amplitude relative to the template peak.
    pub drift_rel: f64,
    pub global_offset_fs: f64,
    /// Delay added to every trace from acquisition `shift_after` on.
    pub shift_fs: f64,
    pub shift_after: usize,
    /// Inclusive range of acquisitions corrupted by detector saturation.
    #[serde(default)]
    pub excluded: Option<[usize; 2]>,
    /// Height of the overlap peak in the raw channel relative to the template peak;
    /// zero disables the raw channel.
    pub raw_peak_rel: f64,
    /// Width parameter of the raw-channel overlap peak `e^{-t²/width²}` [fs].
    pub raw_peak_width_fs: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        crate::config::RunConfig::default().synth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub config: SynthConfig,
    /// Applied delay of each acquisition [fs].
    pub delay_fs: Vec<f64>,
    /// Stage position where the pulses overlap, per acquisition [mm].
    pub overlap_stage_mm: Vec<f64>,
    pub template_peak: f64,
}

/// Samples `template` onto a stage grid for each acquisition, delayed by the
/// global offset plus the mid-run shift, and adds noise, drift, detector
/// saturation in the excluded range, and a raw channel with an overlap peak.
pub fn synthesize_traces(
    template: &TimeTrace,
    cfg: &SynthConfig,
    wave_plates: WavePlates,
    seed: u64,
) -> Result<(RawTraceSet, GroundTruth)> {
    if cfg.n_traces == 0 || cfg.n_stage < 4 || !(cfg.stage_step_mm > 0.0) {
        return Err(Error::InvalidParameter("synthetic set needs traces, >= 4 stage points and a positive step".into()));
    }
    if !(cfg.noise_rel >= 0.0) || !(cfg.drift_rel >= 0.0) || !(cfg.raw_peak_rel >= 0.0) || !(cfg.raw_peak_width_fs > 0.0) {
        return Err(Error::InvalidParameter("noise, drift and peak levels must be >= 0".into()));
    }
    let times = template.times();
    let spline = CubicSpline::new(&times, &template.values);
    let (t_lo, t_hi) = (times[0], times[times.len() - 1]);
    let g = |t: f64| if t < t_lo || t > t_hi { 0.0 } else { spline.eval(t) };
    let peak = template.peak_abs();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, cfg.noise_rel * peak).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let phase0: f64 = rng.random_range(0.0..std::f64::consts::TAU);

    let mid = (cfg.n_stage - 1) as f64 / 2.0;
    let stage: Vec<f64> = (0..cfg.n_stage)
        .map(|i| cfg.stage_center_mm + (i as f64 - mid) * cfg.stage_step_mm)
        .collect();
    let delays: Vec<f64> = stage.iter().map(|s| stage_to_delay(s - cfg.stage_center_mm)).collect();
    let width = cfg.raw_peak_width_fs * 1e-3;

    let mut traces = Vec::with_capacity(cfg.n_traces);
    let mut delay_fs = Vec::with_capacity(cfg.n_traces);
    let mut overlap = Vec::with_capacity(cfg.n_traces);
    for j in 0..cfg.n_traces {
        let tau = cfg.global_offset_fs + if j >= cfg.shift_after { cfg.shift_fs } else { 0.0 };
        let tau_ps = tau * 1e-3;
        let phase = phase0 + std::f64::consts::TAU * j as f64 / cfg.n_traces as f64;
        let (offset, slope) = (phase.cos(), phase.sin());
        let saturated = cfg.excluded.is_some_and(|[a, b]| j >= a && j <= b);
        let mut values = Vec::with_capacity(cfg.n_stage);
        let mut raw = Vec::with_capacity(cfg.n_stage);
        for (i, &t) in delays.iter().enumerate() {
            let x = i as f64 / (cfg.n_stage - 1) as f64 - 0.5;
            let drift = cfg.drift_rel * peak * (offset + 2.0 * slope * x);
            let mut v = g(t - tau_ps) + drift + noise.sample(&mut rng);
            if saturated {
                v = (8.0 * v).clamp(-0.6 * peak, 0.6 * peak) + 0.5 * peak;
            }
            values.push(v);
            let bump = cfg.raw_peak_rel * peak * (-(t - tau_ps).powi(2) / (width * width)).exp();
            raw.push(v + bump + 0.5 * peak * x);
        }
        traces.push(RawTrace {
            index: j,
            stage_mm: stage.clone(),
            values,
            raw: (cfg.raw_peak_rel > 0.0).then_some(raw),
        });
        delay_fs.push(tau);
        overlap.push(cfg.stage_center_mm + delay_to_stage(tau_ps));
    }
    Ok((
        RawTraceSet {
            wave_plates,
            referencing: Referencing::RfReferenced,
            traces,
        },
        GroundTruth {
            seed,
            config: cfg.clone(),
            delay_fs,
            overlap_stage_mm: overlap,
            template_peak: peak,
        },
    ))
}
