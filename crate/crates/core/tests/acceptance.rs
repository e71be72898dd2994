//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits nonzero only when a criterion outside `EXPECTED_FAIL` fails, so the
//! known model limitations stay visible without breaking the test suite.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eoscorr::analysis::{
    analyze, autocorr_to_pulsewidth, spectral_average, stage_to_delay, synthesize_traces, PulseShape, RawTraceSet,
    WavePlates,
};
use eoscorr::correlators::{green_xx_closed_form, green_xx_im, green_xx_im_coincidence, green_xx_weyl_integrated, response_r};
use eoscorr::fdt::{check_pointwise, check_quadrature_phase, check_signal_ratio, hilbert_transform, random_samples};
use eoscorr::numerics::fft::trace_from_spectrum;
use eoscorr::numerics::quad::Tolerance;
use eoscorr::signal::{
    brute_force_oracle, relative_rms, sweep_beam_distance, trace, trace_pair, zero_crossing, FrequencyGrid,
    KPlaneQuadrature, OracleConfig, TraceOutput,
};
use eoscorr::units::vacuum_wavenumber;
use eoscorr::{ComplexSpectrum, RunConfig, SignalKind, TimeTrace};

/// Criteria that fail at the documented parameters; see the README.
const EXPECTED_FAIL: [usize; 3] = [5, 10, 11];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Check = fn(&Ctx) -> Outcome;

struct Ctx {
    cfg: RunConfig,
    vac: TraceOutput,
    src: TraceOutput,
    pair_seconds: f64,
}

fn positive(s: &ComplexSpectrum) -> Vec<(f64, Complex64)> {
    s.frequencies().into_iter().zip(s.values.iter().copied()).filter(|(f, _)| *f > 0.0).collect()
}

fn value_at(s: &ComplexSpectrum, f: f64) -> Complex64 {
    s.values[s.index_of(f).expect("frequency on grid")]
}

fn c1_pointwise(ctx: &Ctx) -> Outcome {
    let t = Instant::now();
    let model = ctx.cfg.geometry().unwrap().dielectric;
    let r = check_pointwise(&model, &random_samples(200, ctx.cfg.seed));
    let secs = t.elapsed().as_secs_f64();
    outcome(
        r.check.pass && r.samples >= 100 && secs < 1.0,
        format!("max relative residual {:.2e} over {} samples in {secs:.3} s", r.check.value, r.samples),
    )
}

fn c2_signal_ratio(ctx: &Ctx) -> Outcome {
    let c = check_signal_ratio(&ctx.vac.spectrum, &ctx.src.spectrum, [0.5, 4.5]).unwrap();
    outcome(c.pass, format!("residual {:.2e} (limit 1e-3), trace pair computed in {:.1} s", c.value, ctx.pair_seconds))
}

fn c3_causality(ctx: &Ctx) -> Outcome {
    let t = ctx.src.trace.times();
    let v = &ctx.src.trace.values;
    let total: f64 = v.iter().map(|x| x * x).sum();
    let early: f64 = t.iter().zip(v).filter(|(t, _)| **t < -0.3).map(|(_, x)| x * x).sum();
    let frac = early / total;
    outcome(frac <= 0.01, format!("energy fraction at delta_t < -0.3 ps: {frac:.2e}"))
}

fn c4_symmetry(ctx: &Ctx) -> Outcome {
    let v = &ctx.vac.trace.values;
    let n = v.len();
    let peak = ctx.vac.trace.peak_abs();
    let odd = (0..n).map(|j| (v[j] - v[n - 1 - j]).abs()).fold(0.0, f64::max) / peak;
    let argmax = (0..n).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
    let t_max = ctx.vac.trace.times()[argmax];
    outcome(
        odd <= 1e-6 && t_max.abs() < 1e-12,
        format!("odd part {odd:.2e} of peak, argmax at {t_max} ps"),
    )
}

fn c5_shape(ctx: &Ctx) -> Outcome {
    let pts = positive(&ctx.vac.spectrum);
    let peak = pts.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let f_peak = pts.iter().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0;
    let rising = pts.windows(2).filter(|w| w[1].0 <= 1.9).all(|w| w[1].1.re > w[0].1.re);
    let changes = |lo: f64, hi: f64| {
        pts.windows(2)
            .filter(|w| w[0].0 >= lo && w[1].0 <= hi && w[0].1.re.signum() != w[1].1.re.signum())
            .count()
    };
    let (before, within) = (changes(0.0, 2.0), changes(2.0, 3.0));
    let tail = value_at(&ctx.vac.spectrum, 4.5).norm() / peak;
    let fz = zero_crossing(&ctx.vac.spectrum, 2.0, 3.0).unwrap_or(f64::NAN);
    let ok = [rising, before == 0 && within == 1, tail >= 0.05];
    outcome(
        ok.iter().all(|x| *x),
        format!(
            "rising to {f_peak:.3} THz: {}; sign changes in 2-3 THz: {within} (at {fz:.3} THz), below 2 THz: {before}; |S(4.5 THz)|/peak = {:.2}% (limit 5%)",
            ok[0],
            tail * 100.0
        ),
    )
}

fn c6_distance(ctx: &Ctx) -> Outcome {
    let geom = ctx.cfg.geometry().unwrap();
    let s = sweep_beam_distance(&geom, &[30.0, 50.0], &ctx.cfg.frequency_grid(), &ctx.cfg.kplane()).unwrap();
    let f30 = zero_crossing(&s[0], 0.5, 4.5).unwrap_or(f64::NAN);
    let f50 = zero_crossing(&s[1], 0.5, 4.5).unwrap_or(f64::NAN);
    outcome(f30 > f50, format!("f_zero(30 um) = {f30:.3} THz, f_zero(50 um) = {f50:.3} THz"))
}

fn c7_oracle(ctx: &Ctx) -> Outcome {
    let t = Instant::now();
    let oc = OracleConfig::default();
    let grid = FrequencyGrid { f_max_thz: oc.f_max_thz, n_freq: (oc.f_max_thz / oc.df_thz).round() as usize };
    let mut geom = ctx.cfg.geometry().unwrap();
    geom.length_um = 20.0;
    let mut overlap = geom.with_delta_r(0.0);
    overlap.dielectric = overlap.dielectric.lossless();
    let cases = [
        (geom, SignalKind::Vacuum, "vacuum 50 um"),
        (geom, SignalKind::Source, "source 50 um"),
        (overlap, SignalKind::Vacuum, "vacuum 0 um lossless"),
    ];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (g, kind, label) in cases {
        let p = trace(&g, kind, &grid, &KPlaneQuadrature::default()).unwrap().trace;
        let idx: Vec<usize> = (0..p.values.len()).filter(|&j| p.times()[j].abs() <= 1.5).collect();
        let delays: Vec<f64> = idx.iter().map(|&j| p.times()[j]).collect();
        let pipe: Vec<f64> = idx.iter().map(|&j| p.values[j]).collect();
        let o = brute_force_oracle(&g, kind, &delays, &oc).unwrap();
        let rms = relative_rms(&pipe, &o.values);
        worst = worst.max(rms);
        parts.push(format!("{label} {:.3}% (oracle self-estimate {:.2}%)", rms * 100.0, o.error_estimate * 100.0));
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(worst <= 0.02 && secs <= 600.0, format!("{} in {secs:.1} s", parts.join(", ")))
}

fn c8_green(ctx: &Ctx) -> Outcome {
    let model = ctx.cfg.geometry().unwrap().dielectric;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let tol = Tolerance { rel: 1e-9, ..Default::default() };
    let mut weyl: f64 = 0.0;
    for _ in 0..20 {
        let r: f64 = rng.random_range(10.0..200.0);
        let cos_t: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        let sep = [r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t];
        let f = rng.random_range(0.5..4.5);
        let w = green_xx_weyl_integrated(&model, sep, f, tol).unwrap().value;
        let c = green_xx_closed_form(&model, sep, f).unwrap();
        weyl = weyl.max((w - c).norm() / c.norm());
    }

    let lossless = model.lossless();
    let f = 1.0;
    let k = lossless.refractive_index(f).unwrap().re * vacuum_wavenumber(f);
    let r = 0.01 / k;
    let near = green_xx_im(&lossless, [r, 0.0, 0.0], f).unwrap();
    let limit = green_xx_im_coincidence(&lossless, f);
    let coincidence = (near / limit - 1.0).abs();

    let (df, fmax) = (0.005f64, 40.0f64);
    let m = (fmax / df).round() as i64;
    let n = (2 * m + 1) as usize;
    let dt = 1.0 / (n as f64 * df);
    let t0 = -(m as f64) * dt;
    let mut leak: f64 = 0.0;
    for sep in [[30.0, 0.0, 0.0], [0.0, 0.0, 30.0]] {
        let spec: Vec<Complex64> = (-m..=m)
            .map(|k| {
                let f = k as f64 * df;
                response_r(&model, sep, [0.0; 3], f).unwrap() * (-(f / 8.0).powi(2)).exp()
            })
            .collect();
        let g = trace_from_spectrum(&spec, t0, dt);
        let total: f64 = g.iter().map(|v| v.norm_sqr()).sum();
        let early: f64 = g.iter().enumerate().filter(|(j, _)| t0 + *j as f64 * dt < 0.0).map(|(_, v)| v.norm_sqr()).sum();
        leak = leak.max(early / total);
    }
    outcome(
        weyl <= 1e-6 && coincidence <= 1e-3 && leak <= 1e-4,
        format!("Weyl vs closed form {weyl:.1e}; coincidence limit {coincidence:.1e}; R negative-time energy {leak:.1e}"),
    )
}

fn c9_dielectric(ctx: &Ctx) -> Outcome {
    let m = ctx.cfg.geometry().unwrap().dielectric;
    let lst = (m.static_permittivity() / m.eps_inf / (m.f_lo / m.f_to).powi(2) - 1.0).abs();
    let mut conj: f64 = 0.0;
    let mut passive = true;
    for j in 0..=5000 {
        let f = 0.01 * (5000f64).powf(j as f64 / 5000.0);
        let e = m.permittivity(f).unwrap();
        conj = conj.max((m.permittivity(-f).unwrap() - e.conj()).norm() / e.norm());
        passive &= e.im >= 0.0 && m.refractive_index(f).unwrap().im >= 0.0;
    }
    outcome(
        lst <= 1e-12 && conj <= 1e-12 && passive,
        format!("LST ratio error {lst:.1e}; eps(-f) vs eps(f)* {conj:.1e}; passive on 0.01-50 THz: {passive}"),
    )
}

fn c10_analysis(ctx: &Ctx) -> Outcome {
    let stage = stage_to_delay(-1.5e-3);
    let stage_ok = (stage * 100.0).round() / 100.0 == -0.01;

    let sc = &ctx.cfg.synth;
    let (set, _) = synthesize_traces(&ctx.vac.trace, sc, WavePlates::QwpQwp, ctx.cfg.seed).unwrap();
    let [a, b] = sc.excluded.unwrap();
    let set = RawTraceSet {
        traces: set.traces.into_iter().filter(|t| t.index < a || t.index > b).collect(),
        ..set
    };
    let out = analyze(&set, sc.stage_center_mm, Some(sc.shift_after), &ctx.cfg.analysis).unwrap();
    let drift = out.drift_fs[1];
    let shift = out.phase_fit.shift_fs;

    let width = autocorr_to_pulsewidth(168.0, PulseShape::Sech2).unwrap();

    let (n, dt) = (201, 0.0333);
    let t0 = -100.0 * dt;
    let base: Vec<f64> = (0..n)
        .map(|j| {
            let t = t0 + j as f64 * dt;
            (-t * t / 0.05).exp() * (2.0 * PI * 2.0 * t).cos()
        })
        .collect();
    let s = 9;
    let shifted: Vec<f64> = (0..n).map(|j| base[(j + n - s) % n]).collect();
    let one = spectral_average(std::slice::from_ref(&base), t0, dt, &[0.0], 0.0, SignalKind::Vacuum).unwrap();
    let two = spectral_average(&[base, shifted], t0, dt, &[0.0, -(s as f64) * dt], 0.0, SignalKind::Vacuum).unwrap();
    let scale = one.spectrum.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let coherence = one
        .spectrum
        .values
        .iter()
        .zip(&two.spectrum.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale;

    let ok = [
        stage_ok,
        (drift - sc.shift_fs).abs() <= 16.7,
        (shift - sc.global_offset_fs).abs() <= 2.0,
        (width - 110.0).abs() <= 1.0,
        coherence <= 1e-10,
    ];
    outcome(
        ok.iter().all(|x| *x),
        format!(
            "-1.5 um -> {stage:.6} ps: {}; drift {drift:.2} fs vs {}: {}; phase-fit offset {shift:.2} fs vs {}: {}; 168 fs sech2 -> {width:.2} fs: {}; coherence {coherence:.1e}: {}",
            ok[0], sc.shift_fs, ok[1], sc.global_offset_fs, ok[2], ok[3], ok[4]
        ),
    )
}

fn c11_quadrature(ctx: &Ctx) -> Outcome {
    let band = [0.5, 4.5];
    let (v, s) = (&ctx.vac.trace, &ctx.src.trace);
    let main = check_quadrature_phase(v, s, band).unwrap();
    let in_phase = check_quadrature_phase(v, &TimeTrace { kind: SignalKind::Source, ..v.clone() }, band).unwrap();
    let anti = TimeTrace { kind: SignalKind::Source, values: v.values.iter().map(|x| -x).collect(), ..v.clone() };
    let anti_phase = check_quadrature_phase(v, &anti, band).unwrap();
    let hilbert = check_quadrature_phase(v, &hilbert_transform(v), band).unwrap();
    let controls = !in_phase.check.pass && !anti_phase.check.pass && hilbert.check.pass;
    outcome(
        main.check.pass && controls,
        format!(
            "median |phase| {:.3} rad, deviation {:.3} rad (limit 0.2) over {} bins; in-phase control {:.3}, anti-phase control {:.3}, Hilbert pair {:.1e}",
            main.median_phase, main.check.value, main.bins, in_phase.check.value, anti_phase.check.value, hilbert.check.value
        ),
    )
}

/// `Σ S(f) e^{-iΩt} dΩ` evaluated at arbitrary delays.
fn direct_trace(s: &ComplexSpectrum, times: &[f64]) -> Vec<f64> {
    let f = s.frequencies();
    times
        .iter()
        .map(|&t| {
            let g: Complex64 = f.iter().zip(&s.values).map(|(f, v)| v * Complex64::from_polar(1.0, -2.0 * PI * f * t)).sum();
            g.re * 2.0 * PI * s.df_thz
        })
        .collect()
}

fn c12_determinism(ctx: &Ctx) -> Outcome {
    let geom = ctx.cfg.geometry().unwrap();
    let (grid, quad) = (ctx.cfg.frequency_grid(), ctx.cfg.kplane());
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| trace_pair(&geom, &grid, &quad).unwrap())
    };
    let bits = |t: &TraceOutput| t.trace.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    let (v1, s1) = run(1);
    let (v4, s4) = run(4);
    let same = [&v1, &v4].iter().all(|v| bits(v) == bits(&ctx.vac)) && [&s1, &s4].iter().all(|s| bits(s) == bits(&ctx.src));

    let fine_grid = FrequencyGrid { n_freq: 2 * grid.n_freq, ..grid };
    let fine_quad = KPlaneQuadrature { radial_panels: 2 * quad.radial_panels, ..quad };
    let fine = trace(&geom, SignalKind::Vacuum, &fine_grid, &fine_quad).unwrap();
    let window: Vec<f64> = ctx.vac.trace.times().into_iter().filter(|t| t.abs() <= 4.0).collect();
    let coarse = direct_trace(&ctx.vac.spectrum, &window);
    let doubled = direct_trace(&fine.spectrum, &window);
    let change = relative_rms(&doubled, &coarse);
    outcome(
        same && change <= 0.005,
        format!("bit-identical across reruns and 1/4 workers: {same}; delay-trace RMS change under k-plane and frequency grid doubling {:.2e}", change),
    )
}

fn main() {
    let cfg = RunConfig::default();
    let geom = cfg.geometry().unwrap();
    let t = Instant::now();
    let (vac, src) = trace_pair(&geom, &cfg.frequency_grid(), &cfg.kplane()).unwrap();
    let ctx = Ctx { cfg, vac, src, pair_seconds: t.elapsed().as_secs_f64() };

    let criteria: [(&str, Check); 12] = [
        ("pointwise fluctuation-dissipation relation", c1_pointwise),
        ("signal-level -1/2 relation", c2_signal_ratio),
        ("source signal causality", c3_causality),
        ("vacuum signal symmetry", c4_symmetry),
        ("vacuum spectral shape", c5_shape),
        ("beam-distance monotonicity", c6_distance),
        ("brute-force oracle agreement", c7_oracle),
        ("Green-tensor identities", c8_green),
        ("dielectric identities", c9_dielectric),
        ("analysis closed loop", c10_analysis),
        ("pi/2 quadrature relation", c11_quadrature),
        ("determinism and grid stability", c12_determinism),
    ];
    let mut passed = 0;
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        let o = f(&ctx);
        println!("criterion {id:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if o.pass {
            passed += 1;
        } else if !EXPECTED_FAIL.contains(&id) {
            unexpected.push(id);
        }
    }
    println!("{passed}/12 criteria pass");
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
