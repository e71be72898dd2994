use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::spline::CubicSpline;

/// Spline upsampling factor used before cross-correlating.
const UPSAMPLE: usize = 16;

/// Minimum peak-to-noise ratio accepted by [`raw_overlap_peak`].
pub const PEAK_SNR_FLOOR: f64 = 5.0;

/// Vertex offset of the parabola through three equally spaced samples, in
/// units of the spacing.
fn parabola_offset(ym: f64, y0: f64, yp: f64) -> f64 {
    let den = ym - 2.0 * y0 + yp;
    if den == 0.0 {
        0.0
    } else {
        (0.5 * (ym - yp) / den).clamp(-0.5, 0.5)
    }
}

/// Delay [fs] of trace `b` relative to trace `a`, both sampled every `dt_ps`.
///
/// Both traces are mean-subtracted and spline-interpolated onto a grid
/// `UPSAMPLE` times finer, cross-correlated over lags up to a quarter of the
/// window, and the peak is refined with a parabola.
pub fn drift_crosscorr(a: &[f64], b: &[f64], dt_ps: f64) -> Result<f64> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::GridMismatch(format!("traces have {} and {} samples", n, b.len())));
    }
    if n < 4 {
        return Err(Error::InvalidParameter("need at least four samples".into()));
    }
    let x: Vec<f64> = (0..n).map(|j| j as f64).collect();
    let fine = |v: &[f64]| -> Vec<f64> {
        let mean = v.iter().sum::<f64>() / n as f64;
        let centred: Vec<f64> = v.iter().map(|y| y - mean).collect();
        let s = CubicSpline::new(&x, &centred);
        (0..=(n - 1) * UPSAMPLE).map(|k| s.eval(k as f64 / UPSAMPLE as f64)).collect()
    };
    let fa = fine(a);
    let fb = fine(b);
    let m = fa.len();
    let max_lag = (m - 1) / 4;
    let corr: Vec<f64> = (0..=2 * max_lag)
        .map(|i| {
            let lag = i as i64 - max_lag as i64;
            let lo = (-lag).max(0) as usize;
            let hi = (m as i64 - lag.max(0)) as usize;
            (lo..hi).map(|k| fa[k] * fb[(k as i64 + lag) as usize]).sum()
        })
        .collect();
    let (best, &peak) = corr
        .iter()
        .enumerate()
        .max_by(|p, q| p.1.total_cmp(q.1).then(q.0.cmp(&p.0)))
        .expect("non-empty");
    let low = corr.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(peak > 0.0) || peak - low <= 1e-12 * peak.abs() || best == 0 || best == corr.len() - 1 {
        return Err(Error::FlatCorrelation);
    }
    let frac = parabola_offset(corr[best - 1], peak, corr[best + 1]);
    let lag = best as f64 - max_lag as f64 + frac;
    Ok(lag / UPSAMPLE as f64 * dt_ps * 1e3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakPosition {
    pub stage_mm: f64,
    pub index: usize,
    /// Peak sits on the first or last sample; no refinement applied.
    pub boundary: bool,
    pub snr: f64,
}

/// Stage position of the largest `|raw|`, refined by a parabola.
pub fn raw_overlap_peak(stage_mm: &[f64], raw: &[f64], snr_floor: f64) -> Result<PeakPosition> {
    let n = raw.len();
    if n != stage_mm.len() || n < 3 {
        return Err(Error::GridMismatch("stage grid and raw trace differ or are too short".into()));
    }
    let mag: Vec<f64> = raw.iter().map(|v| v.abs()).collect();
    let (i, &peak) = mag
        .iter()
        .enumerate()
        .max_by(|p, q| p.1.total_cmp(q.1).then(q.0.cmp(&p.0)))
        .expect("non-empty");
    // noise from first differences, robust to the smooth signal
    let mut d: Vec<f64> = raw.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    d.sort_by(f64::total_cmp);
    let sigma = d[d.len() / 2] / (0.674_489_75 * 2f64.sqrt());
    let snr = if sigma > 0.0 { peak / sigma } else { f64::INFINITY };
    if snr < snr_floor {
        return Err(Error::LowSnr { snr, floor: snr_floor });
    }
    if i == 0 || i == n - 1 {
        return Ok(PeakPosition { stage_mm: stage_mm[i], index: i, boundary: true, snr });
    }
    let step = stage_mm[i + 1] - stage_mm[i];
    let frac = parabola_offset(mag[i - 1], mag[i], mag[i + 1]);
    Ok(PeakPosition {
        stage_mm: stage_mm[i] + frac * step,
        index: i,
        boundary: false,
        snr,
    })
}
