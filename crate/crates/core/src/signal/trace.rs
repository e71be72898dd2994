//! Assembly of delay traces from the sampled spectra.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{spectral_kernels, ComplexSpectrum, ExperimentGeometry, KPlaneQuadrature, SignalKind, SpectralSample, TimeTrace};
use crate::error::{Error, Result};
use crate::numerics::fft::trace_from_spectrum;

/// Symmetric frequency grid `k f_max/n_freq`, `k = -n_freq..=n_freq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    #[serde(rename = "f_max_THz")]
    pub f_max_thz: f64,
    pub n_freq: usize,
}

impl FrequencyGrid {
    pub fn df(&self) -> f64 {
        self.f_max_thz / self.n_freq as f64
    }

    /// Total two-sided sample count (odd).
    pub fn len(&self) -> usize {
        2 * self.n_freq + 1
    }

    pub fn is_empty(&self) -> bool {
        self.n_freq == 0
    }

    pub fn dt(&self) -> f64 {
        1.0 / (self.len() as f64 * self.df())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_max_thz > 0.0) || self.n_freq < 2 {
            return Err(Error::InvalidParameter(format!(
                "frequency grid needs f_max > 0 and n_freq >= 2, got {} / {}",
                self.f_max_thz, self.n_freq
            )));
        }
        if self.f_max_thz < 6.0 {
            log::warn!("f_max = {} THz truncates the spectrum (>= 6 THz recommended)", self.f_max_thz);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOutput {
    pub trace: TimeTrace,
    pub spectrum: ComplexSpectrum,
    /// Largest `|g|` within the outer 5% of the delay window, relative to the peak.
    pub edge_ratio: f64,
    /// Largest imaginary part left after the inverse transform, relative to the peak.
    pub imag_residue: f64,
    pub kplane_evaluations: usize,
}

impl TraceOutput {
    pub fn aliased(&self) -> bool {
        self.edge_ratio > 0.01
    }
}

fn sample_positive(geom: &ExperimentGeometry, grid: &FrequencyGrid, quad: &KPlaneQuadrature) -> Result<Vec<SpectralSample>> {
    geom.validate()?;
    grid.validate()?;
    let df = grid.df();
    (0..=grid.n_freq)
        .into_par_iter()
        .map(|k| spectral_kernels(geom, k as f64 * df, quad))
        .collect()
}

fn assemble(kind: SignalKind, samples: &[SpectralSample], grid: &FrequencyGrid) -> TraceOutput {
    let m = grid.n_freq;
    let n = grid.len();
    let pick = |s: &SpectralSample| match kind {
        SignalKind::Vacuum => Complex64::new(s.vacuum.re, 0.0),
        SignalKind::Source => s.source,
    };
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (k, s) in samples.iter().enumerate() {
        values[m + k] = pick(s);
        values[m - k] = pick(s).conj();
    }
    if kind == SignalKind::Source {
        values[m].im = 0.0;
    }
    let dt = grid.dt();
    let t0 = -(m as f64) * dt;
    let g = trace_from_spectrum(&values, t0, dt);
    let peak = g.iter().fold(0.0f64, |a, v| a.max(v.re.abs()));
    let imag = g.iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
    let rim = (n / 20).max(1);
    let edge = g[..rim]
        .iter()
        .chain(&g[n - rim..])
        .fold(0.0f64, |a, v| a.max(v.re.abs()));
    let edge_ratio = if peak > 0.0 { edge / peak } else { 0.0 };
    if edge_ratio > 0.01 {
        log::warn!(
            "{} trace: {:.1}% of the peak remains at the edge of the delay window; the trace may be aliased",
            kind.name(),
            100.0 * edge_ratio
        );
    }
    TraceOutput {
        trace: TimeTrace {
            kind,
            t0_ps: t0,
            dt_ps: dt,
            values: g.iter().map(|v| v.re).collect(),
        },
        spectrum: ComplexSpectrum {
            kind,
            f0_thz: -(m as f64) * grid.df(),
            df_thz: grid.df(),
            values,
        },
        edge_ratio,
        imag_residue: if peak > 0.0 { imag / peak } else { 0.0 },
        kplane_evaluations: samples.iter().map(|s| s.evaluations).sum(),
    }
}

/// One signal on `grid`.
pub fn trace(geom: &ExperimentGeometry, kind: SignalKind, grid: &FrequencyGrid, quad: &KPlaneQuadrature) -> Result<TraceOutput> {
    let samples = sample_positive(geom, grid, quad)?;
    Ok(assemble(kind, &samples, grid))
}

/// Vacuum and source signals from a single pass over the frequencies.
pub fn trace_pair(geom: &ExperimentGeometry, grid: &FrequencyGrid, quad: &KPlaneQuadrature) -> Result<(TraceOutput, TraceOutput)> {
    let samples = sample_positive(geom, grid, quad)?;
    Ok((
        assemble(SignalKind::Vacuum, &samples, grid),
        assemble(SignalKind::Source, &samples, grid),
    ))
}

/// Vacuum spectra for each beam separation, all else fixed.
pub fn sweep_beam_distance(
    geom: &ExperimentGeometry,
    distances: &[f64],
    grid: &FrequencyGrid,
    quad: &KPlaneQuadrature,
) -> Result<Vec<ComplexSpectrum>> {
    if distances.is_empty() {
        return Err(Error::InvalidParameter("no beam distances given".into()));
    }
    distances
        .iter()
        .map(|&d| trace(&geom.with_delta_r(d), SignalKind::Vacuum, grid, quad).map(|t| t.spectrum))
        .collect()
}

/// First sign change of `Re S` between `f_lo` and `f_hi`, linearly interpolated.
pub fn zero_crossing(spectrum: &ComplexSpectrum, f_lo: f64, f_hi: f64) -> Option<f64> {
    let f = spectrum.frequencies();
    let pts: Vec<(f64, f64)> = f
        .iter()
        .zip(&spectrum.values)
        .filter(|(&fk, _)| fk >= f_lo && fk <= f_hi)
        .map(|(&fk, v)| (fk, v.re))
        .collect();
    pts.windows(2).find_map(|w| {
        let ((f0, y0), (f1, y1)) = (w[0], w[1]);
        (y0 != 0.0 && y0.signum() != y1.signum()).then(|| f0 + (f1 - f0) * y0 / (y0 - y1))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> (ExperimentGeometry, FrequencyGrid, KPlaneQuadrature) {
        let g = ExperimentGeometry::new(&Default::default(), 110.0, 10.0, 50.0).unwrap();
        let grid = FrequencyGrid { f_max_thz: 8.0, n_freq: 80 };
        (g, grid, KPlaneQuadrature { rel_tol: 1e-7, ..Default::default() })
    }

    #[test]
    fn grid_geometry() {
        let grid = FrequencyGrid { f_max_thz: 10.0, n_freq: 400 };
        assert_eq!(grid.len(), 801);
        assert!((grid.df() - 0.025).abs() < 1e-15);
        assert!((grid.dt() * 801.0 * 0.025 - 1.0).abs() < 1e-12);
        assert!(FrequencyGrid { f_max_thz: 10.0, n_freq: 1 }.validate().is_err());
    }

    #[test]
    fn vacuum_trace_even_and_peaked_at_zero() {
        let (g, grid, q) = coarse();
        let out = trace(&g, SignalKind::Vacuum, &grid, &q).unwrap();
        let v = &out.trace.values;
        let n = v.len();
        let peak = out.trace.peak_abs();
        for j in 0..n {
            assert!((v[j] - v[n - 1 - j]).abs() <= 1e-9 * peak);
        }
        let arg = (0..n).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        assert_eq!(arg, n / 2);
        assert!(out.imag_residue < 1e-9);
    }

    #[test]
    fn zero_crossing_interpolates() {
        let s = ComplexSpectrum {
            kind: SignalKind::Vacuum,
            f0_thz: 0.0,
            df_thz: 1.0,
            values: [3.0, 1.0, -1.0, -2.0].iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        };
        assert_eq!(zero_crossing(&s, 0.0, 3.0), Some(1.5));
        assert_eq!(zero_crossing(&s, 2.0, 3.0), None);
    }
}
