use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use eoscorr::analysis::{
    delay_to_stage, drift_crosscorr, lowpass, spectral_average, stage_to_delay, stitch_segments, zero_delay_phase_fit,
};
use eoscorr::correlators::{correlation_c, response_r};
use eoscorr::dielectric::DielectricModel;
use eoscorr::fdt::check_signal_ratio;
use eoscorr::io::{parse_csv, trace_csv};
use eoscorr::numerics::fft::spectrum_of_real;
use eoscorr::units::HBAR;
use eoscorr::{ComplexSpectrum, CrystalParams, SignalKind, TimeTrace};

fn model() -> DielectricModel {
    CrystalParams::default().dielectric
}

fn lossy_model() -> impl Strategy<Value = DielectricModel> {
    (4.0..12.0f64, 1.0..8.0f64, 1.01..1.5f64, 0.0..0.5f64).prop_map(|(eps_inf, f_to, ratio, gamma)| DielectricModel {
        eps_inf,
        f_to,
        f_lo: f_to * ratio,
        gamma,
        ..model()
    })
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-100.0..100.0f64)
}

fn pulse(n: usize, dt: f64, center: f64) -> Vec<f64> {
    let t0 = -((n / 2) as f64) * dt;
    (0..n)
        .map(|j| {
            let t = t0 + j as f64 * dt - center;
            (-t * t / 0.08).exp() * (2.0 * PI * 2.0 * t).cos()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn permittivity_is_passive_and_hermitian(m in lossy_model(), f in 0.01..50.0f64) {
        let e = m.permittivity(f).unwrap();
        let n = m.refractive_index(f).unwrap();
        prop_assert!(e.im >= 0.0 && n.im >= 0.0);
        prop_assert!((n * n - e).norm() <= 1e-14 * e.norm().max(1.0) * 10.0);
        prop_assert_eq!(m.permittivity(-f).unwrap(), e.conj());
    }

    #[test]
    fn lst_relation(m in lossy_model()) {
        let r = m.static_permittivity() / m.eps_inf / (m.f_lo / m.f_to).powi(2);
        prop_assert!((r - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn correlation_matches_response(r in point(), rp in point(), f in 0.05..8.0f64, sign in prop::bool::ANY) {
        prop_assume!((0..3).map(|i| (r[i] - rp[i]).powi(2)).sum::<f64>().sqrt() > 1.0);
        let f = if sign { f } else { -f };
        let m = model();
        let c = correlation_c(&m, r, rp, f).unwrap();
        let rr = response_r(&m, r, rp, f).unwrap();
        prop_assert!((c - HBAR * f.signum() * rr.im).abs() <= 1e-12 * HBAR * rr.norm());
        prop_assert_eq!(c, correlation_c(&m, r, rp, -f).unwrap());
        let swapped = response_r(&m, rp, r, f).unwrap();
        prop_assert!((swapped - rr).norm() <= 1e-12 * rr.norm());
    }

    #[test]
    fn stage_delay_round_trip(mm in -50.0..50.0f64) {
        prop_assert!((delay_to_stage(stage_to_delay(mm)) - mm).abs() <= 1e-12 * mm.abs().max(1.0));
    }

    #[test]
    fn lowpass_is_a_projection(seed in 0u64..1000, cutoff in 0.5..14.0f64) {
        let x: Vec<f64> = (0..128).map(|j| ((j as f64 * 0.37 + seed as f64).sin() * 1e3).fract()).collect();
        let once = lowpass(&x, 0.0333, cutoff);
        let twice = lowpass(&once, 0.0333, cutoff);
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn drift_estimate_is_equivariant(tau in -0.3..0.3f64) {
        let dt = 0.0333;
        let a = pulse(201, dt, 0.0);
        let b = pulse(201, dt, tau);
        let est = drift_crosscorr(&a, &b, dt).unwrap();
        prop_assert!((est * 1e-3 - tau).abs() <= 0.5 * dt, "{} vs {}", est, tau);
    }

    #[test]
    fn phase_fit_is_equivariant(tau in -0.05..0.05f64) {
        let dt = 0.0333;
        let n = 201;
        let t0 = -100.0 * dt;
        let spec = spectrum_of_real(&pulse(n, dt, tau), t0, dt);
        let s = ComplexSpectrum { kind: SignalKind::Vacuum, f0_thz: -100.0 / (n as f64 * dt), df_thz: 1.0 / (n as f64 * dt), values: spec };
        let fit = zero_delay_phase_fit(&s, [1.7, 2.7]).unwrap();
        prop_assert!((fit.shift_fs - tau * 1e3).abs() <= 2.0, "{} vs {}", fit.shift_fs, tau * 1e3);
    }

    #[test]
    fn spectral_average_restores_coherence(shift in 1usize..50) {
        let (n, dt) = (201, 0.0333);
        let t0 = -100.0 * dt;
        let a = pulse(n, dt, 0.0);
        let b: Vec<f64> = (0..n).map(|j| a[(j + n - shift) % n]).collect();
        let one = spectral_average(std::slice::from_ref(&a), t0, dt, &[0.0], 0.0, SignalKind::Vacuum).unwrap();
        let two = spectral_average(&[a, b], t0, dt, &[0.0, -(shift as f64) * dt], 0.0, SignalKind::Vacuum).unwrap();
        let peak = one.spectrum.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in one.spectrum.values.iter().zip(&two.spectrum.values) {
            prop_assert!((x.norm() - y.norm()).abs() <= 1e-10 * peak);
        }
    }

    #[test]
    fn stitching_without_shifts_is_a_weighted_mean(w1 in 0.1..10.0f64, w2 in 0.1..10.0f64) {
        let a = pulse(64, 0.0333, 0.0);
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v + 1.0).collect();
        let s = stitch_segments(&[(a.clone(), w1), (b.clone(), w2)], &[0.0, 0.0], 33.3).unwrap();
        for ((x, y), z) in a.iter().zip(&b).zip(&s) {
            prop_assert!(((w1 * x + w2 * y) / (w1 + w2) - z).abs() <= 1e-12);
        }
    }

    #[test]
    fn signal_ratio_is_scale_free(scale in 1e-6..1e6f64) {
        let n = 41;
        let mk = |kind, f: &dyn Fn(f64) -> Complex64| ComplexSpectrum {
            kind,
            f0_thz: -2.0,
            df_thz: 0.1,
            values: (0..n).map(|k| f(-2.0 + k as f64 * 0.1)).collect(),
        };
        let v = mk(SignalKind::Vacuum, &|f| Complex64::new((-f * f).exp(), 0.0));
        let s = mk(SignalKind::Source, &|f| Complex64::new(0.3 * f, -0.5 * (-f * f).exp() + 1e-3 * f));
        let base = check_signal_ratio(&v, &s, [0.5, 1.5]).unwrap().value;
        let sc = |x: &ComplexSpectrum| ComplexSpectrum { values: x.values.iter().map(|c| c * scale).collect(), ..x.clone() };
        let scaled = check_signal_ratio(&sc(&v), &sc(&s), [0.5, 1.5]).unwrap().value;
        prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1e-300) * 10.0);
    }

    #[test]
    fn trace_csv_round_trips_bit_exact(values in prop::collection::vec(-1e30..1e30f64, 1..50), dt in 1e-3..1.0f64) {
        let t = TimeTrace { kind: SignalKind::Vacuum, t0_ps: -dt * 3.0, dt_ps: dt, values: values.clone() };
        let columns = parse_csv(&trace_csv(&t), &["delta_t_ps", "value"]).unwrap();
        prop_assert_eq!(&columns[1], &values);
    }
}
