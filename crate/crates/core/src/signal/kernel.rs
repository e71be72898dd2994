//! Frequency-domain signal kernels.
//!
//! With the time integrals done analytically and both Gaussian beam profiles
//! transformed to the Weyl plane, the spatial part of either signal is
//!
//! ```text
//! K(a) = (i/8π²) (πw²/2)² ∫ κdκ e^{-κ²w²/4} Λ(k_z, a)/k_z
//!        × [Ω² 2π J0(κδr) − κ² (c²/ε) π (J0(κδr) − J2(κδr))]
//! ```
//!
//! with `a = Ω n_g/c`. `K(a)` weights `Ω²D`; the vacuum signal needs the
//! pointwise imaginary part, `(K(a) − K(−a)*)/2i`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{time_reduce, ExperimentGeometry};
use crate::correlators::{kz, thermal_factor, wavenumber};
use crate::error::{Error, Result};
use crate::numerics::bessel::bessel_j0_j2;
use crate::numerics::quad::{self, Tolerance};
use crate::units::{angular, C_UM_PER_PS, HBAR, MU_0};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gaussian truncation of the k-plane: `κ w/√8 <= 6`.
const KPLANE_REACH: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KPlaneQuadrature {
    /// Initial panels below the branch point; other regions scale from it.
    pub radial_panels: usize,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for KPlaneQuadrature {
    fn default() -> Self {
        KPlaneQuadrature {
            radial_panels: 48,
            rel_tol: 1e-9,
            max_panels: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub f_thz: f64,
    pub vacuum: Complex64,
    pub source: Complex64,
    pub evaluations: usize,
    /// Quadrature error estimate relative to `|K|`.
    pub rel_error: f64,
}

/// `(e^x − 1 − x)/x²`.
fn phi(x: Complex64) -> Complex64 {
    if x.norm() < 1.0 {
        // Σ x^n/(n + 2)!
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for n in 1..20 {
            term *= x / (n as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        (x.exp() - 1.0 - x) / (x * x)
    }
}

/// `∫₀^ℓ∫₀^ℓ dz dz' e^{ia(z' − z)} e^{i k_z |z − z'|}`, for `Im k_z >= 0`.
pub fn longitudinal(k_z: Complex64, a: f64, ell: f64) -> Complex64 {
    let one_sided = |q: Complex64| ell * ell * phi(I * q * ell);
    one_sided(k_z + a) + one_sided(k_z - a)
}

/// Maps the integration variable to `(κ, dκ/dx)`: a sine map below the
/// branch point `κ_b = Re k`, a cosh map up to `2κ_b`, then linear.
#[derive(Debug, Clone, Copy)]
struct RadialMap {
    kb: f64,
    k_max: f64,
    theta_end: f64,
    s_end: f64,
}

impl RadialMap {
    fn new(kb: f64, k_max: f64) -> Self {
        if kb <= 0.0 {
            return RadialMap { kb: 0.0, k_max, theta_end: 0.0, s_end: 0.0 };
        }
        if kb >= k_max {
            return RadialMap { kb, k_max, theta_end: (k_max / kb).asin(), s_end: 0.0 };
        }
        let s_end = ((2.0 * kb).min(k_max) / kb).acosh();
        RadialMap { kb, k_max, theta_end: PI / 2.0, s_end }
    }

    fn map(&self, x: f64) -> (f64, f64) {
        if x <= self.theta_end {
            (self.kb * x.sin(), self.kb * x.cos())
        } else if x <= self.theta_end + self.s_end {
            let s = x - self.theta_end;
            (self.kb * s.cosh(), self.kb * s.sinh())
        } else {
            (self.linear_start() + (x - self.theta_end - self.s_end), 1.0)
        }
    }

    fn linear_start(&self) -> f64 {
        if self.s_end > 0.0 {
            self.kb * self.s_end.cosh()
        } else {
            self.kb
        }
    }

    fn panels(&self, n: usize, delta_r: f64) -> Vec<(f64, f64)> {
        let mut p = Vec::new();
        if self.theta_end > 0.0 {
            p.extend(quad::uniform_panels(0.0, self.theta_end, n.max(1)));
        }
        if self.s_end > 0.0 {
            p.extend(quad::uniform_panels(self.theta_end, self.theta_end + self.s_end, (n / 4).max(1)));
        }
        let start = if self.theta_end > 0.0 { self.linear_start() } else { 0.0 };
        if start < self.k_max && !(self.kb >= self.k_max) {
            let len = self.k_max - start;
            let m = (n / 2).max((len * delta_r / PI).ceil() as usize).max(1);
            let x0 = self.theta_end + self.s_end;
            p.extend(quad::uniform_panels(x0, x0 + len, m));
        }
        p
    }
}

/// Computes the vacuum and source spectra at one frequency.
///
/// Negative frequencies are obtained by symmetry: the vacuum spectrum is even
/// and the source spectrum Hermitian.
pub fn spectral_kernels(geom: &ExperimentGeometry, f: f64, quad: &KPlaneQuadrature) -> Result<SpectralSample> {
    if !f.is_finite() {
        return Err(Error::NonFinite("frequency"));
    }
    if f < 0.0 {
        let s = spectral_kernels(geom, -f, quad)?;
        return Ok(SpectralSample {
            f_thz: f,
            vacuum: s.vacuum.conj(),
            source: s.source.conj(),
            ..s
        });
    }
    let model = &geom.dielectric;
    let w = angular(f);
    let k = if f == 0.0 { Complex64::new(0.0, 0.0) } else { wavenumber(model, f) };
    let c2_over_eps = C_UM_PER_PS * C_UM_PER_PS / model.eps(f);
    let reduction = time_reduce(geom, f);
    let a = reduction.phase_rate;
    let ell = geom.length_um;
    let wb = geom.w_um;
    let dr = geom.delta_r_um;

    let k_max = KPLANE_REACH * 8f64.sqrt() / wb;
    let radial = RadialMap::new(k.re, k_max);
    let integrand = |x: f64| -> [Complex64; 2] {
        let (kappa, jac) = radial.map(x);
        let q = kz(k, kappa);
        if kappa == 0.0 || q.norm() == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        let (j0, j2) = bessel_j0_j2(kappa * dr);
        let ang = w * w * 2.0 * PI * j0 - kappa * kappa * c2_over_eps * PI * (j0 - j2);
        let common = kappa * jac * (-kappa * kappa * wb * wb / 4.0).exp() * ang / q;
        let plus = ell * ell * phi(I * (q + a) * ell);
        let minus = ell * ell * phi(I * (q - a) * ell);
        [common * (plus + minus), common * (minus + plus)]
    };
    let panels = radial.panels(quad.radial_panels, dr);
    let res = quad::integrate(
        integrand,
        &panels,
        Tolerance {
            abs: 0.0,
            rel: quad.rel_tol,
            max_panels: quad.max_panels,
        },
    );
    if !res.converged {
        return Err(Error::Quadrature {
            f_thz: f,
            k_lo: radial.map(res.worst.0).0,
            k_hi: radial.map(res.worst.1).0,
            error: res.error,
        });
    }
    let beam = PI * wb * wb / 2.0;
    let pre = I / (8.0 * PI * PI) * beam * beam;
    let k_plus = pre * res.value[0];
    let k_minus = pre * res.value[1];

    let envelope = (2.0 / PI).powi(3) * reduction.weight * reduction.weight;
    let source = -0.5 * HBAR * envelope * MU_0 / (2.0 * PI) * k_plus;
    let mut vacuum = envelope * HBAR * MU_0 / (2.0 * PI) * (k_plus - k_minus.conj()) / (2.0 * I);
    if f == 0.0 {
        vacuum = Complex64::new(0.0, 0.0);
    } else if geom.thermal {
        vacuum *= thermal_factor(f, geom.temperature_k)?;
    }
    let scale = k_plus.norm().max(k_minus.norm());
    Ok(SpectralSample {
        f_thz: f,
        vacuum,
        source,
        evaluations: res.evaluations,
        rel_error: if scale > 0.0 { res.error * pre.norm() / scale } else { 0.0 },
    })
}

/// `S_vac(f)`; real up to rounding.
pub fn spectral_kernel_vac(geom: &ExperimentGeometry, f: f64, quad: &KPlaneQuadrature) -> Result<Complex64> {
    if !(f > 0.0) {
        return Err(Error::InvalidParameter(format!("spectral_kernel_vac needs f > 0, got {f}")));
    }
    Ok(spectral_kernels(geom, f, quad)?.vacuum)
}

/// `S_src(f)`, including the `−ħ/2` prefactor.
pub fn spectral_kernel_src(geom: &ExperimentGeometry, f: f64, quad: &KPlaneQuadrature) -> Result<Complex64> {
    if f == 0.0 {
        return Err(Error::InvalidParameter("spectral_kernel_src needs f != 0".into()));
    }
    Ok(spectral_kernels(geom, f, quad)?.source)
}
