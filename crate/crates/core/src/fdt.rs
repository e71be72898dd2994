//! Fluctuation–dissipation checks at correlator and signal level.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correlators::{correlation_c, response_r, CorrelatorSample};
use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};
use crate::numerics::fft::{spectrum_of_real, trace_from_spectrum};
use crate::signal::{ComplexSpectrum, TimeTrace};
use crate::units::HBAR;

pub const POINTWISE_TOL: f64 = 1e-12;
pub const SIGNAL_RATIO_TOL: f64 = 1e-3;
pub const PHASE_TOL: f64 = 0.2;
/// Bins qualify for the phase statistic above this fraction of each peak.
pub const PHASE_MAG_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn new(value: f64, threshold: f64) -> Self {
        Check {
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseCheck {
    /// `max |C − ħ sgn(f) Im R| / (ħ |R|)`.
    pub check: Check,
    pub max_absolute: f64,
    pub samples: usize,
    /// Coincident samples, where `R` is undefined.
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseCheck {
    /// `|median(|arg X|) − π/2|` over the qualifying bins.
    pub check: Check,
    pub median_phase: f64,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdtReport {
    pub band_thz: [f64; 2],
    pub pointwise: Option<PointwiseCheck>,
    /// `max |Im S_src + ½ S_vac| / max |S_vac|` over the band.
    pub signal_ratio: Option<Check>,
    pub quadrature_phase: Option<PhaseCheck>,
    pub pass: bool,
}

impl FdtReport {
    pub fn new(band_thz: [f64; 2]) -> Self {
        FdtReport {
            band_thz,
            pointwise: None,
            signal_ratio: None,
            quadrature_phase: None,
            pass: true,
        }
    }

    /// Recomputes `pass` from the checks present.
    pub fn finish(mut self) -> Self {
        self.pass = self.pointwise.is_none_or(|c| c.check.pass)
            && self.signal_ratio.is_none_or(|c| c.pass)
            && self.quadrature_phase.is_none_or(|c| c.check.pass);
        self
    }
}

/// `n` random sample points in a ±100 µm box at 0.05–8 THz of either sign.
pub fn random_samples(n: usize, seed: u64) -> Vec<CorrelatorSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut p = || [0; 3].map(|_: i32| rng.random_range(-100.0..100.0));
            let r = p();
            let r_prime = p();
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            CorrelatorSample {
                r,
                r_prime,
                f: sign * rng.random_range(0.05..8.0),
            }
        })
        .collect()
}

/// Compares `C` (from the real-arithmetic `Im D`) with `ħ sgn(f) Im R`
/// (from the complex closed form).
pub fn check_pointwise(model: &DielectricModel, samples: &[CorrelatorSample]) -> PointwiseCheck {
    let mut max_rel = 0.0f64;
    let mut max_abs = 0.0f64;
    let mut skipped = 0;
    for s in samples {
        let (Ok(c), Ok(r)) = (
            correlation_c(model, s.r, s.r_prime, s.f),
            response_r(model, s.r, s.r_prime, s.f),
        ) else {
            skipped += 1;
            continue;
        };
        let rhs = HBAR * s.f.signum() * r.im;
        let diff = (c - rhs).abs();
        max_abs = max_abs.max(diff);
        let scale = HBAR * r.norm();
        if scale > 0.0 {
            max_rel = max_rel.max(diff / scale);
        }
    }
    PointwiseCheck {
        check: Check::new(max_rel, POINTWISE_TOL),
        max_absolute: max_abs,
        samples: samples.len() - skipped,
        skipped,
    }
}

fn positive_band(spec: &ComplexSpectrum, band: [f64; 2]) -> Vec<usize> {
    spec.frequencies()
        .iter()
        .enumerate()
        .filter(|(_, &f)| f > 0.0 && f >= band[0] && f <= band[1])
        .map(|(i, _)| i)
        .collect()
}

/// Residual of `Im S_src = −½ S_vac` over `band`, normalised by `max |S_vac|` there.
pub fn check_signal_ratio(vac: &ComplexSpectrum, src: &ComplexSpectrum, band: [f64; 2]) -> Result<Check> {
    if !vac.same_grid(src) {
        return Err(Error::GridMismatch(
            "vacuum and source spectra are on different frequency grids".into(),
        ));
    }
    let idx = positive_band(vac, band);
    if idx.is_empty() {
        return Err(Error::EmptyBand(format!("no positive frequencies in {band:?} THz")));
    }
    let peak = idx.iter().fold(0.0f64, |m, &i| m.max(vac.values[i].norm()));
    if !(peak > 0.0) {
        return Err(Error::EmptyBand("vacuum spectrum vanishes on the band".into()));
    }
    let worst = idx
        .iter()
        .map(|&i| (src.values[i].im + 0.5 * vac.values[i].re).abs())
        .fold(0.0f64, f64::max);
    Ok(Check::new(worst / peak, SIGNAL_RATIO_TOL))
}

fn same_delay_grid(a: &TimeTrace, b: &TimeTrace) -> bool {
    a.values.len() == b.values.len()
        && (a.dt_ps - b.dt_ps).abs() <= 1e-12 * a.dt_ps
        && (a.t0_ps - b.t0_ps).abs() <= 1e-9 * a.dt_ps
}

/// Median over qualifying bins of the folded cross-spectrum phase
/// `|arg(V S*)|`, compared with π/2.
pub fn check_quadrature_phase(vac: &TimeTrace, src: &TimeTrace, band: [f64; 2]) -> Result<PhaseCheck> {
    if !same_delay_grid(vac, src) {
        return Err(Error::GridMismatch("vacuum and source traces are on different delay grids".into()));
    }
    let n = vac.values.len();
    let df = 1.0 / (n as f64 * vac.dt_ps);
    let v = spectrum_of_real(&vac.values, vac.t0_ps, vac.dt_ps);
    let s = spectrum_of_real(&src.values, src.t0_ps, src.dt_ps);
    let freq: Vec<f64> = (0..n).map(|i| crate::numerics::fft::centred_index(i, n) as f64 * df).collect();
    let inband: Vec<usize> = (0..n).filter(|&i| freq[i] > 0.0 && freq[i] >= band[0] && freq[i] <= band[1]).collect();
    let vpk = inband.iter().fold(0.0f64, |m, &i| m.max(v[i].norm()));
    let spk = inband.iter().fold(0.0f64, |m, &i| m.max(s[i].norm()));
    let mut phases: Vec<f64> = inband
        .iter()
        .filter(|&&i| v[i].norm() > PHASE_MAG_FLOOR * vpk && s[i].norm() > PHASE_MAG_FLOOR * spk)
        .map(|&i| (v[i] * s[i].conj()).arg().abs())
        .collect();
    if phases.is_empty() {
        return Err(Error::EmptyBand(format!(
            "no bins in {band:?} THz where both spectra exceed {PHASE_MAG_FLOOR} of their peaks"
        )));
    }
    phases.sort_by(f64::total_cmp);
    let m = phases.len();
    let median = if m % 2 == 1 {
        phases[m / 2]
    } else {
        0.5 * (phases[m / 2 - 1] + phases[m / 2])
    };
    Ok(PhaseCheck {
        check: Check::new((median - PI / 2.0).abs(), PHASE_TOL),
        median_phase: median,
        bins: m,
    })
}

/// Hilbert transform of a real trace (spectrum multiplied by `−i sgn f`).
pub fn hilbert_transform(trace: &TimeTrace) -> TimeTrace {
    let n = trace.values.len();
    let mut spec = spectrum_of_real(&trace.values, trace.t0_ps, trace.dt_ps);
    for (i, v) in spec.iter_mut().enumerate() {
        let k = crate::numerics::fft::centred_index(i, n);
        *v *= Complex64::new(0.0, -(k.signum() as f64));
    }
    let out = trace_from_spectrum(&spec, trace.t0_ps, trace.dt_ps);
    TimeTrace {
        values: out.iter().map(|c| c.re).collect(),
        ..trace.clone()
    }
}
