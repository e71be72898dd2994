use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::ComplexSpectrum;

/// Bins below this fraction of the in-band peak magnitude are not fitted.
pub const MAGNITUDE_FLOOR: f64 = 0.1;
/// Largest phase step of `arg S²` between neighbouring fitted bins that
/// is still unwrapped unambiguously.
const UNWRAP_LIMIT: f64 = 0.9 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseFit {
    /// Delay of the trace relative to zero [fs].
    pub shift_fs: f64,
    /// Phase slope [rad/THz].
    pub slope: f64,
    /// Phase at `f = 0` of the fitted line, modulo π [rad].
    pub intercept: f64,
    pub bins: usize,
}

/// Weighted linear fit of the spectral phase over `band` [THz].
///
/// The phase is taken from `arg(S²)/2`, which is blind to the sign changes a
/// correlation spectrum may have inside the band; weights are `|S|`.
pub fn zero_delay_phase_fit(spectrum: &ComplexSpectrum, band: [f64; 2]) -> Result<PhaseFit> {
    let freqs = spectrum.frequencies();
    let inband: Vec<(f64, Complex64)> = freqs
        .iter()
        .zip(&spectrum.values)
        .filter(|(&f, _)| f > 0.0 && f >= band[0] && f <= band[1])
        .map(|(&f, &v)| (f, v))
        .collect();
    let peak = inband.iter().fold(0.0f64, |m, (_, v)| m.max(v.norm()));
    let pts: Vec<(f64, Complex64)> = inband
        .into_iter()
        .filter(|(_, v)| peak > 0.0 && v.norm() >= MAGNITUDE_FLOOR * peak)
        .collect();
    if pts.len() < 2 {
        return Err(Error::EmptyBand(format!(
            "fewer than two bins in {band:?} THz above {MAGNITUDE_FLOOR} of the in-band peak"
        )));
    }
    let mut psi = Vec::with_capacity(pts.len());
    let mut prev = (pts[0].1 * pts[0].1).arg();
    psi.push(prev);
    for w in pts.windows(2) {
        let raw = (w[1].1 * w[1].1).arg();
        let step = (raw - prev + PI).rem_euclid(2.0 * PI) - PI;
        if step.abs() > UNWRAP_LIMIT {
            return Err(Error::Unwrap { f_lo: w[0].0, f_hi: w[1].0 });
        }
        let next = psi[psi.len() - 1] + step;
        psi.push(next);
        prev = raw;
    }
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((f, v), p) in pts.iter().zip(&psi) {
        let w = v.norm();
        let y = 0.5 * p;
        sw += w;
        sx += w * f;
        sy += w * y;
        sxx += w * f * f;
        sxy += w * f * y;
    }
    let det = sw * sxx - sx * sx;
    if !(det.abs() > 0.0) {
        return Err(Error::EmptyBand("degenerate frequency spread in the fit band".into()));
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / sw;
    Ok(PhaseFit {
        shift_fs: slope / (2.0 * PI) * 1e3,
        slope,
        intercept: intercept.rem_euclid(PI),
        bins: pts.len(),
    })
}
