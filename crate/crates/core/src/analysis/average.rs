use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::fft::{centred_index, spectrum_of_real};
use crate::signal::{ComplexSpectrum, SignalKind};
use crate::units::angular;

/// Weighted per-sample average of segments after shifting segment `j` by
/// `shifts_fs[j]` rounded to whole steps of `step_fs` (positive delays it).
/// Samples shifted in from outside the window repeat the edge value.
pub fn stitch_segments(segments: &[(Vec<f64>, f64)], shifts_fs: &[f64], step_fs: f64) -> Result<Vec<f64>> {
    let (first, _) = segments
        .first()
        .ok_or_else(|| Error::InvalidParameter("no segments to stitch".into()))?;
    let n = first.len();
    if segments.len() != shifts_fs.len() {
        return Err(Error::InvalidParameter("one shift per segment required".into()));
    }
    if segments.iter().any(|(s, _)| s.len() != n) {
        return Err(Error::GridMismatch("segments have different lengths".into()));
    }
    if !(step_fs > 0.0) || segments.iter().any(|(_, w)| !(*w > 0.0)) {
        return Err(Error::InvalidParameter("step and weights must be positive".into()));
    }
    let total: f64 = segments.iter().map(|(_, w)| w).sum();
    let mut out = vec![0.0; n];
    for ((seg, w), shift) in segments.iter().zip(shifts_fs) {
        let m = (shift / step_fs).round() as i64;
        for (i, o) in out.iter_mut().enumerate() {
            let src = (i as i64 - m).clamp(0, n as i64 - 1) as usize;
            *o += w * seg[src];
        }
    }
    out.iter_mut().for_each(|v| *v /= total);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedSpectrum {
    pub spectrum: ComplexSpectrum,
    /// Per-frequency minimum of the real and imaginary parts over the
    /// uncertainty interval.
    pub lower: Vec<Complex64>,
    pub upper: Vec<Complex64>,
    pub halfwidth_fs: f64,
}

/// Whether `[lo, hi]` contains `x0 + 2πk` for some integer `k`.
fn contains_angle(lo: f64, hi: f64, x0: f64) -> bool {
    let k = ((lo - x0) / (2.0 * PI)).ceil();
    x0 + 2.0 * PI * k <= hi
}

/// Extremes of `Re` and `Im` of `m e^{iθ}` over `θ ∈ [-a, a]`.
fn arc_range(m: Complex64, a: f64) -> (Complex64, Complex64) {
    let r = m.norm();
    let phi = m.arg();
    let (lo, hi) = (phi - a, phi + a);
    let ends = [Complex64::from_polar(r, lo), Complex64::from_polar(r, hi)];
    let mut min = Complex64::new(ends[0].re.min(ends[1].re), ends[0].im.min(ends[1].im));
    let mut max = Complex64::new(ends[0].re.max(ends[1].re), ends[0].im.max(ends[1].im));
    if contains_angle(lo, hi, 0.0) {
        max.re = r;
    }
    if contains_angle(lo, hi, PI) {
        min.re = -r;
    }
    if contains_angle(lo, hi, PI / 2.0) {
        max.im = r;
    }
    if contains_angle(lo, hi, -PI / 2.0) {
        min.im = -r;
    }
    (min, max)
}

/// Mean over traces of `FFT(trace_j) e^{iΩΔt_j}`, where `Δt_j` [ps] is the
/// delay applied to trace `j`, with the band spanned by rotating the mean
/// through `±Ω·halfwidth`.
pub fn spectral_average(
    traces: &[Vec<f64>],
    t0_ps: f64,
    dt_ps: f64,
    delays_ps: &[f64],
    halfwidth_fs: f64,
    kind: SignalKind,
) -> Result<AveragedSpectrum> {
    let n = traces
        .first()
        .ok_or_else(|| Error::InvalidParameter("no traces to average".into()))?
        .len();
    if traces.iter().any(|t| t.len() != n) {
        return Err(Error::GridMismatch("traces have different lengths".into()));
    }
    if delays_ps.len() != traces.len() {
        return Err(Error::InvalidParameter("one delay per trace required".into()));
    }
    let df = 1.0 / (n as f64 * dt_ps);
    let freq: Vec<f64> = (0..n).map(|i| centred_index(i, n) as f64 * df).collect();
    let mut mean = vec![Complex64::new(0.0, 0.0); n];
    for (t, &d) in traces.iter().zip(delays_ps) {
        let s = spectrum_of_real(t, t0_ps, dt_ps);
        for ((m, v), f) in mean.iter_mut().zip(&s).zip(&freq) {
            *m += v * Complex64::from_polar(1.0, angular(*f) * d);
        }
    }
    let count = traces.len() as f64;
    mean.iter_mut().for_each(|m| *m /= count);
    let (lower, upper) = mean
        .iter()
        .zip(&freq)
        .map(|(m, f)| arc_range(*m, (angular(*f) * halfwidth_fs * 1e-3).abs()))
        .unzip();
    Ok(AveragedSpectrum {
        spectrum: ComplexSpectrum {
            kind,
            f0_thz: freq[0],
            df_thz: df,
            values: mean,
        },
        lower,
        upper,
        halfwidth_fs,
    })
}
