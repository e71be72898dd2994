//! Discrete transforms in the project Fourier convention
//!
//! ```text
//! g(t) = ∫ dΩ G(Ω) e^{-iΩt},      G(Ω) = (1/2π) ∫ dt g(t) e^{iΩt}
//! ```
//!
//! Spectra are stored on a centred frequency grid `f_k = k Δf` with
//! `k = -⌊n/2⌋ .. n-1-⌊n/2⌋`; for odd `n` the grid is symmetric about zero.
//! Time samples are `t_j = t0 + j Δt` and `Δf = 1 / (n Δt)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// Logical centred index of storage position `i` for an `n`-point grid.
#[inline]
pub fn centred_index(i: usize, n: usize) -> i64 {
    i as i64 - (n / 2) as i64
}

/// Centred frequency grid in THz for `n` samples spaced `dt` ps apart.
pub fn frequency_grid(n: usize, dt: f64) -> Vec<f64> {
    let df = 1.0 / (n as f64 * dt);
    (0..n).map(|i| centred_index(i, n) as f64 * df).collect()
}

fn dft(buf: &mut [Complex64], direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(buf.len(), direction);
    fft.process(buf);
}

/// Spectrum `G(f_k)` of samples `g(t0 + j dt)`, centred order.
pub fn spectrum_from_trace(values: &[Complex64], t0: f64, dt: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    dft(&mut buf, FftDirection::Inverse);
    let df = 1.0 / (n as f64 * dt);
    (0..n)
        .map(|i| {
            let k = centred_index(i, n);
            let src = k.rem_euclid(n as i64) as usize;
            let f = k as f64 * df;
            buf[src] * Complex64::from_polar(dt / (2.0 * PI), 2.0 * PI * f * t0)
        })
        .collect()
}

/// Samples `g(t0 + j dt)` of the trace whose centred spectrum is `spectrum`.
pub fn trace_from_spectrum(spectrum: &[Complex64], t0: f64, dt: f64) -> Vec<Complex64> {
    let n = spectrum.len();
    let df = 1.0 / (n as f64 * dt);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, s) in spectrum.iter().enumerate() {
        let k = centred_index(i, n);
        let f = k as f64 * df;
        buf[k.rem_euclid(n as i64) as usize] = s * Complex64::from_polar(1.0, -2.0 * PI * f * t0);
    }
    dft(&mut buf, FftDirection::Forward);
    let scale = 2.0 * PI * df;
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// Real-valued convenience wrapper around [`spectrum_from_trace`].
pub fn spectrum_of_real(values: &[f64], t0: f64, dt: f64) -> Vec<Complex64> {
    let c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    spectrum_from_trace(&c, t0, dt)
}
