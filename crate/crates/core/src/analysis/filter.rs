use num_complex::Complex64;

use crate::numerics::fft::{centred_index, spectrum_from_trace, trace_from_spectrum};

/// Zero-phase low-pass: zeroes all DFT bins with `|f| > cutoff` [THz].
/// A cutoff at or above Nyquist returns the input unchanged.
pub fn lowpass(values: &[f64], dt_ps: f64, cutoff_thz: f64) -> Vec<f64> {
    let n = values.len();
    let nyquist = 0.5 / dt_ps;
    if cutoff_thz >= nyquist {
        log::warn!("low-pass cutoff {cutoff_thz} THz is at or above Nyquist ({nyquist:.3} THz); trace left unfiltered");
        return values.to_vec();
    }
    let df = 1.0 / (n as f64 * dt_ps);
    let c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut spec = spectrum_from_trace(&c, 0.0, dt_ps);
    for (i, v) in spec.iter_mut().enumerate() {
        if (centred_index(i, n) as f64 * df).abs() > cutoff_thz {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    trace_from_spectrum(&spec, 0.0, dt_ps).iter().map(|v| v.re).collect()
}
