//! Direct quadrature of the eight-dimensional signal integrals.
//!
//! Each pulse is integrated over (x, y, z, t) on a tensor-product grid:
//! Gauss–Hermite in x, y and t (matched to the Gaussian envelope) and
//! Gauss–Legendre in z. The correlator's time dependence comes from a
//! trapezoid sum over frequency of the closed-form `C` or `R`. Nothing here
//! shares code with the Weyl-plane kernel except the dielectric model.
//!
//! With `γ > 0` the near field of `Im D` carries an `Im(1/ε)(3s − 1)/R³`
//! term that only integrates to zero as a principal value, which a tensor
//! grid cannot resolve when the two beams overlap. Overlapping-beam checks
//! therefore use the lossless model.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentGeometry, SignalKind};
use crate::correlators::{im_green_xx_with_index, omega2_green_xx_with, thermal_factor};
use crate::error::{Error, Result};
use crate::numerics::quad::{gauss_hermite, gauss_legendre};
use crate::units::{angular, vacuum_wavenumber, C_UM_PER_PS, HBAR, MU_0};

/// Largest crystal length the oracle accepts [µm].
pub const ORACLE_MAX_LENGTH_UM: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Gauss–Hermite nodes per transverse dimension and pulse.
    pub n_transverse: usize,
    /// Gauss–Legendre nodes along the crystal.
    pub n_z: usize,
    /// Gauss–Hermite nodes in time per pulse.
    pub n_time: usize,
    #[serde(rename = "f_max_THz")]
    pub f_max_thz: f64,
    #[serde(rename = "df_THz")]
    pub df_thz: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_transverse: 8,
            n_z: 10,
            n_time: 24,
            f_max_thz: 8.0,
            df_thz: 0.04,
        }
    }
}

impl OracleConfig {
    /// Coarser companion grid used for the error estimate.
    pub fn coarser(&self) -> Self {
        OracleConfig {
            n_transverse: self.n_transverse.saturating_sub(2).max(2),
            n_z: self.n_z.saturating_sub(2).max(2),
            n_time: self.n_time.saturating_sub(6).max(4),
            ..*self
        }
    }

    pub fn nodes_per_pulse(&self) -> usize {
        self.n_transverse * self.n_transverse * self.n_z * self.n_time
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub delays_ps: Vec<f64>,
    pub values: Vec<f64>,
    /// Relative RMS difference to the same sum on [`OracleConfig::coarser`].
    pub error_estimate: f64,
    pub config: OracleConfig,
}

struct Node {
    x: f64,
    y: f64,
    z: f64,
    weight: f64,
}

fn beam_nodes(geom: &ExperimentGeometry, cfg: &OracleConfig, x0: f64) -> Vec<Node> {
    let (xi, wi) = gauss_hermite(cfg.n_transverse);
    let (zi, wz) = gauss_legendre(cfg.n_z);
    // e^{-2x²/w²} = e^{-ξ²} with x = ξ w/√2
    let s = geom.w_um / 2f64.sqrt();
    let half = 0.5 * geom.length_um;
    let amp = (2.0 / PI).powf(1.5);
    let mut nodes = Vec::new();
    for (a, wa) in xi.iter().zip(&wi) {
        for (b, wb) in xi.iter().zip(&wi) {
            for (c, wc) in zi.iter().zip(&wz) {
                nodes.push(Node {
                    x: x0 + s * a,
                    y: s * b,
                    z: half * (c + 1.0),
                    weight: amp * s * wa * s * wb * half * wc,
                });
            }
        }
    }
    nodes
}

fn oracle_sum(geom: &ExperimentGeometry, kind: SignalKind, delays: &[f64], cfg: &OracleConfig) -> Result<Vec<f64>> {
    let probe = beam_nodes(geom, cfg, 0.0);
    let source = beam_nodes(geom, cfg, -geom.delta_r_um);
    let (ti, wt) = gauss_hermite(cfg.n_time);
    let tau = geom.tau_sigma_ps();
    let ts = tau / 2f64.sqrt();
    let model = geom.dielectric;
    let n_g = model.n_g;

    // pair geometry
    let mut pairs = Vec::with_capacity(probe.len() * source.len());
    for p in &probe {
        for q in &source {
            let d = [p.x - q.x, p.y - q.y, p.z - q.z];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if r == 0.0 && kind == SignalKind::Source {
                return Err(Error::InvalidParameter(
                    "source oracle needs beam nodes that never coincide (delta_r > 0)".into(),
                ));
            }
            let s = if r > 0.0 { (d[0] / r).powi(2) } else { 0.0 };
            pairs.push((r, s));
        }
    }

    let m = (cfg.f_max_thz / cfg.df_thz).round() as i64;
    let per_freq: Vec<Complex64> = (-m..=m)
        .into_par_iter()
        .map(|k| {
            let f = k as f64 * cfg.df_thz;
            let w = angular(f);
            // ∫dt L₁ e^{-iΩt} and ∫dt' L₂ e^{iΩt'} (δt applied below), per z node
            let time_factor = |z: f64, sign: f64| -> Complex64 {
                ti.iter()
                    .zip(&wt)
                    .map(|(x, wx)| Complex64::from_polar(ts * wx, sign * w * (n_g * z / C_UM_PER_PS + ts * x)))
                    .sum()
            };
            let t1: Vec<Complex64> = probe.iter().map(|p| p.weight * time_factor(p.z, -1.0)).collect();
            let t2: Vec<Complex64> = source.iter().map(|q| q.weight * time_factor(q.z, 1.0)).collect();

            let mut acc = Complex64::new(0.0, 0.0);
            match kind {
                SignalKind::Vacuum => {
                    if f == 0.0 {
                        return acc;
                    }
                    let n = model.n(f);
                    let k0 = vacuum_wavenumber(f);
                    let coincident = n.re * k0 / (6.0 * PI);
                    let mut thermal = 1.0;
                    if geom.thermal {
                        thermal = thermal_factor(f, geom.temperature_k).unwrap_or(1.0);
                    }
                    let pre = HBAR * MU_0 * f.signum() * w * w / (2.0 * PI) * thermal;
                    for (i, a) in t1.iter().enumerate() {
                        let mut row = Complex64::new(0.0, 0.0);
                        for (j, b) in t2.iter().enumerate() {
                            let (r, s) = pairs[i * t2.len() + j];
                            let im_d = if r == 0.0 { coincident } else { im_green_xx_with_index(n, k0, r, s) };
                            row += b * im_d;
                        }
                        acc += a * row;
                    }
                    acc * pre
                }
                SignalKind::Source => {
                    let k = model.n(f) * vacuum_wavenumber(f);
                    let c2_over_eps = C_UM_PER_PS * C_UM_PER_PS / model.eps(f);
                    for (i, a) in t1.iter().enumerate() {
                        let mut row = Complex64::new(0.0, 0.0);
                        for (j, b) in t2.iter().enumerate() {
                            let (r, s) = pairs[i * t2.len() + j];
                            row += b * omega2_green_xx_with(k, c2_over_eps, w, r, s);
                        }
                        acc += a * row;
                    }
                    acc * (-0.5 * HBAR * MU_0 / (2.0 * PI))
                }
            }
        })
        .collect();

    let dw = angular(cfg.df_thz);
    Ok(delays
        .iter()
        .map(|&dt| {
            let mut g = Complex64::new(0.0, 0.0);
            for (idx, v) in per_freq.iter().enumerate() {
                let k = idx as i64 - m;
                let end = if k.abs() == m { 0.5 } else { 1.0 };
                g += end * v * Complex64::from_polar(1.0, -angular(k as f64 * cfg.df_thz) * dt);
            }
            (g * dw).re
        })
        .collect())
}

/// `G(δt)` at each delay by direct quadrature, on a geometry with
/// `ℓ <= 20 µm`.
pub fn brute_force_oracle(
    geom: &ExperimentGeometry,
    kind: SignalKind,
    delays: &[f64],
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    geom.validate()?;
    if geom.length_um > ORACLE_MAX_LENGTH_UM {
        return Err(Error::InvalidParameter(format!(
            "oracle geometry must have length <= {ORACLE_MAX_LENGTH_UM} um, got {}",
            geom.length_um
        )));
    }
    if !(cfg.df_thz > 0.0) || !(cfg.f_max_thz > cfg.df_thz) || cfg.n_transverse < 1 || cfg.n_z < 1 || cfg.n_time < 1 {
        return Err(Error::InvalidParameter("oracle grid".into()));
    }
    let values = oracle_sum(geom, kind, delays, cfg)?;
    let coarse = oracle_sum(geom, kind, delays, &cfg.coarser())?;
    Ok(OracleResult {
        delays_ps: delays.to_vec(),
        error_estimate: relative_rms(&coarse, &values),
        values,
        config: *cfg,
    })
}

/// `√(Σ(a − b)² / Σ b²)`.
pub fn relative_rms(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}
