//! Bulk dyadic Green tensor (xx component) and the THz field correlators.
//!
//! ```text
//! R(r, r', Ω) = μ₀ Ω² D(r, r', Ω) / 2π
//! C(r, r', Ω) = ħ μ₀ sgn(Ω) Ω² Im D(r, r', Ω) / 2π
//! ```
//!
//! `D` is the xx element of the homogeneous-medium Green tensor of the vector
//! Helmholtz equation, with `k = n(f) 2πf / c`. Crystal facets are ignored.
//!
//! Three evaluations of `D` are provided and are cross-checked in tests:
//! the complex closed form, a real-arithmetic expansion of `Im D` used by `C`,
//! and the Weyl (angular spectrum) integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};
use crate::numerics::bessel::bessel_j0_j2;
use crate::numerics::quad::{self, Tolerance};
use crate::units::{angular, vacuum_wavenumber, C_UM_PER_PS, HBAR, K_B, MU_0, PLANCK_H, HZ_PER_THZ};

/// Position or separation in µm.
pub type Vec3 = [f64; 3];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative floor on `|k_z| / |k|` below which a Weyl node is refused.
pub const BRANCH_FLOOR: f64 = 1e-6;

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn length(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// THz wavenumber `k = n(f) 2πf/c` in rad/µm; `Im k >= 0` for either sign of `f`.
pub fn wavenumber(model: &DielectricModel, f: f64) -> Complex64 {
    model.n(f) * vacuum_wavenumber(f)
}

/// Longitudinal wavenumber `√(k² − κ²)` on the branch `Im k_z >= 0`.
#[inline]
pub fn kz(k: Complex64, k_par: f64) -> Complex64 {
    let mut q = (k * k - k_par * k_par).sqrt();
    if q.im < 0.0 || (q.im == 0.0 && q.re < 0.0) {
        q = -q;
    }
    q
}

/// `(1 + ∂x²/k²)` applied to the scalar Green function of wavenumber
/// `k_src`, at separation `r` with `s = (R_x/R)²`.
fn dyadic_xx(k_src: Complex64, k: Complex64, r: f64, s: f64) -> Complex64 {
    let u = k_src * r;
    let g = (I * u).exp() / (4.0 * PI * r);
    let near = ((I * u - 1.0) + (3.0 - 3.0 * I * u - u * u) * s) / (k * k * r * r);
    g * (1.0 + near)
}

/// `D_xx(R, f)` from the closed form. Rejects `|R| = 0` and `f = 0`.
pub fn green_xx_closed_form(model: &DielectricModel, sep: Vec3, f: f64) -> Result<Complex64> {
    if !f.is_finite() || sep.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("green function argument"));
    }
    let r = length(&sep);
    if r == 0.0 {
        return Err(Error::Coincidence);
    }
    if f == 0.0 {
        return Err(Error::InvalidParameter(
            "D_xx diverges at f = 0; use the response function".into(),
        ));
    }
    let k = wavenumber(model, f);
    let s = (sep[0] / r).powi(2);
    Ok(dyadic_xx(k, k, r, s))
}

/// `Ω² D_xx`, finite at `f = 0` where it tends to the electrostatic near field.
fn omega2_green_xx(model: &DielectricModel, r: f64, s: f64, f: f64) -> Complex64 {
    let c2_over_eps = C_UM_PER_PS * C_UM_PER_PS / model.eps(f);
    omega2_green_xx_with(wavenumber(model, f), c2_over_eps, angular(f), r, s)
}

/// `Ω² D_xx` for precomputed `k`, `c²/ε` and `Ω`.
pub(crate) fn omega2_green_xx_with(k: Complex64, c2_over_eps: Complex64, w: f64, r: f64, s: f64) -> Complex64 {
    let u = k * r;
    let g = (I * u).exp() / (4.0 * PI * r);
    let near = ((I * u - 1.0) + (3.0 - 3.0 * I * u - u * u) * s) / (r * r);
    g * (w * w + c2_over_eps * near)
}

/// `Im D_xx(R, f)` evaluated in real arithmetic.
///
/// Writes the bracket as `(1 − s) + (3s − 1)(1 − iu)/u²` with `u = kR`, so this
/// shares no code with [`green_xx_closed_form`].
pub fn green_xx_im(model: &DielectricModel, sep: Vec3, f: f64) -> Result<f64> {
    if !f.is_finite() || sep.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("green function argument"));
    }
    let r = length(&sep);
    if r == 0.0 {
        return Err(Error::Coincidence);
    }
    if f == 0.0 {
        return Ok(0.0);
    }
    Ok(im_green_xx_with_index(model.n(f), vacuum_wavenumber(f), r, (sep[0] / r).powi(2)))
}

/// Real-arithmetic `Im D_xx` for a precomputed index `n` and vacuum
/// wavenumber `k0`, at distance `r` with `s = (R_x/R)²`.
pub(crate) fn im_green_xx_with_index(n: Complex64, k0: f64, r: f64, s: f64) -> f64 {
    let p = n.re * k0 * r;
    let q = n.im * k0 * r;

    let mod2 = p * p + q * q;
    let mod4 = mod2 * mod2;
    // (1 − iu) / u²  with  1/u² = ((p² − q²) − 2ipq)/|u|⁴
    let a = p * p - q * q;
    let b = -2.0 * p * q;
    let x_re = ((1.0 + q) * a + p * b) / mod4;
    let x_im = ((1.0 + q) * b - p * a) / mod4;
    let b_re = (1.0 - s) + (3.0 * s - 1.0) * x_re;
    let b_im = (3.0 * s - 1.0) * x_im;
    let decay = (-q).exp();
    decay * (p.sin() * b_re + p.cos() * b_im) / (4.0 * PI * r)
}

/// `Im D_xx(r, r, f)`, the lossless coincidence limit `Re n · k₀ / 6π`.
///
/// With `γ > 0` the exact limit diverges; the real part of the index is
/// used regardless, which is accurate while the crystal is weakly absorbing.
pub fn green_xx_im_coincidence(model: &DielectricModel, f: f64) -> f64 {
    model.n(f).re * vacuum_wavenumber(f) / (6.0 * PI)
}

/// Weyl integrand weight at transverse wavevector `k_par = (k_x, k_y)`:
/// `(i/8π²)(1 − k_x²/k²) e^{i k_z |dz|} / k_z`, such that
/// `D_xx = ∫ d²k_par weight · e^{i k_par·ρ}`.
pub fn green_xx_weyl(model: &DielectricModel, k_par: [f64; 2], dz: f64, f: f64) -> Result<Complex64> {
    if f == 0.0 {
        return Err(Error::InvalidParameter("Weyl weight undefined at f = 0".into()));
    }
    let k = wavenumber(model, f);
    let kp = (k_par[0] * k_par[0] + k_par[1] * k_par[1]).sqrt();
    let q = kz(k, kp);
    if q.norm() < BRANCH_FLOOR * k.norm() {
        return Err(Error::InvalidParameter(format!(
            "k_par = {kp} rad/um is within the branch-point floor"
        )));
    }
    let transverse = 1.0 - k_par[0] * k_par[0] / (k * k);
    Ok(I / (8.0 * PI * PI) * transverse * (I * q * dz.abs()).exp() / q)
}

#[derive(Debug, Clone, Copy)]
pub struct WeylEval {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// `D_xx(R, f)` by numerical integration of the Weyl representation.
///
/// The angular integral is done with Bessel functions; the radial integral
/// has three subtracted Yukawa (imaginary-wavenumber) spectra removed so that
/// the remainder decays like `κ^{-2.5}` even at `dz = 0`, and the subtracted
/// pieces are added back in closed form.
pub fn green_xx_weyl_integrated(
    model: &DielectricModel,
    sep: Vec3,
    f: f64,
    tol: Tolerance,
) -> Result<WeylEval> {
    if f == 0.0 {
        return Err(Error::InvalidParameter("Weyl integral undefined at f = 0".into()));
    }
    if f < 0.0 {
        let e = green_xx_weyl_integrated(model, sep, -f, tol)?;
        return Ok(WeylEval {
            value: e.value.conj(),
            ..e
        });
    }
    let r = length(&sep);
    if r == 0.0 {
        return Err(Error::Coincidence);
    }
    let rho = (sep[0] * sep[0] + sep[1] * sep[1]).sqrt();
    let dz = sep[2].abs();
    let cos2 = if rho > 0.0 {
        (sep[0] * sep[0] - sep[1] * sep[1]) / (rho * rho)
    } else {
        1.0
    };
    let k = wavenumber(model, f);
    let k2 = k * k;

    // Yukawa wavenumbers i b_j, weights α_j matching the κ^-1, κ^-3, κ^-5 tails
    let kabs = k.norm();
    let b2 = [kabs * kabs, 4.0 * kabs * kabs, 9.0 * kabs * kabs];
    let alpha = solve_vandermonde3(b2, [Complex64::new(1.0, 0.0), -k2, k2 * k2]);

    let integrand = |kappa: f64, jac: f64| -> Complex64 {
        let (j0, j2) = bessel_j0_j2(kappa * rho);
        let ang = 2.0 * PI * j0 - kappa * kappa / k2 * PI * (j0 - cos2 * j2);
        let q = kz(k, kappa);
        let mut spec = (I * q * dz).exp() / q;
        for j in 0..3 {
            let qj = (kappa * kappa + b2[j]).sqrt();
            spec -= alpha[j] * (-qj * dz).exp() / (I * qj);
        }
        kappa * ang * spec * jac
    };

    let kb = k.re;
    let theta_end = PI / 2.0;
    let s_end = 2f64.acosh();
    let reach = (40.0 / dz.max(1e-9)).min(2000.0 / r);
    let k_max = 2.0 * kb + reach.max(10.0 * kb);
    // piecewise map x -> κ: sine map below the branch point, cosh map above it
    let map = |x: f64| -> (f64, f64) {
        if x <= theta_end {
            (kb * x.sin(), kb * x.cos())
        } else if x <= theta_end + s_end {
            let s = x - theta_end;
            (kb * s.cosh(), kb * s.sinh())
        } else {
            (2.0 * kb + (x - theta_end - s_end), 1.0)
        }
    };
    let tail_start = theta_end + s_end;
    let tail_len = k_max - 2.0 * kb;
    let n_tail = ((tail_len * rho / PI).ceil() as usize + (tail_len * dz / 4.0).ceil() as usize + 8).min(4000);
    let mut panels = quad::uniform_panels(0.0, theta_end, 8);
    panels.extend(quad::uniform_panels(theta_end, tail_start, 4));
    panels.extend(quad::uniform_panels(tail_start, tail_start + tail_len, n_tail));

    let res = quad::integrate(
        |x| {
            let (kappa, jac) = map(x);
            [integrand(kappa, jac)]
        },
        &panels,
        tol,
    );
    if !res.converged {
        return Err(Error::Quadrature {
            f_thz: f,
            k_lo: map(res.worst.0).0,
            k_hi: map(res.worst.1).0,
            error: res.error,
        });
    }
    let s = (sep[0] / r).powi(2);
    let mut value = I / (8.0 * PI * PI) * res.value[0];
    for j in 0..3 {
        value += alpha[j] * dyadic_xx(I * b2[j].sqrt(), k, r, s);
    }
    Ok(WeylEval {
        value,
        error: res.error / (8.0 * PI * PI),
        evaluations: res.evaluations,
    })
}

/// Solves `Σ_j α_j x_j^m = rhs_m` for `m = 0, 1, 2`.
fn solve_vandermonde3(x: [f64; 3], rhs: [Complex64; 3]) -> [Complex64; 3] {
    // Lagrange form: α_j = Σ_m rhs_m c_{j,m}
    let mut alpha = [Complex64::new(0.0, 0.0); 3];
    for j in 0..3 {
        let (a, b) = match j {
            0 => (x[1], x[2]),
            1 => (x[0], x[2]),
            _ => (x[0], x[1]),
        };
        let denom = (x[j] - a) * (x[j] - b);
        // polynomial (t − a)(t − b) = t² − (a + b) t + ab
        alpha[j] = (rhs[2] - (a + b) * rhs[1] + a * b * rhs[0]) / denom;
    }
    alpha
}

/// Response function `R(r, r', f) = μ₀ (2πf)² D_xx / 2π`.
///
/// At `f = 0` this returns the electrostatic limit `μ₀ c² ∂x²(1/4πR) / (2π ε(0))`.
pub fn response_r(model: &DielectricModel, r: Vec3, r_prime: Vec3, f: f64) -> Result<Complex64> {
    let sep = sub(&r, &r_prime);
    if !f.is_finite() || sep.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("response argument"));
    }
    let d = length(&sep);
    if d == 0.0 {
        return Err(Error::Coincidence);
    }
    let s = (sep[0] / d).powi(2);
    Ok(MU_0 * omega2_green_xx(model, d, s, f) / (2.0 * PI))
}

/// Correlation function `C(r, r', f) = ħ μ₀ sgn(f) (2πf)² Im D_xx / 2π`.
///
/// Coincident points use [`green_xx_im_coincidence`].
pub fn correlation_c(model: &DielectricModel, r: Vec3, r_prime: Vec3, f: f64) -> Result<f64> {
    let sep = sub(&r, &r_prime);
    if !f.is_finite() || sep.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("correlation argument"));
    }
    if f == 0.0 {
        return Ok(0.0);
    }
    let im_d = if length(&sep) == 0.0 {
        green_xx_im_coincidence(model, f)
    } else {
        green_xx_im(model, sep, f)?
    };
    let w = angular(f);
    Ok(HBAR * MU_0 * f.signum() * w * w * im_d / (2.0 * PI))
}

/// Bose–Einstein enhancement `coth(h|f| / 2 k_B T)` of the correlation
/// function. Returns 1 at `T = 0`.
pub fn thermal_factor(f: f64, temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) || !f.is_finite() {
        return Err(Error::InvalidParameter(format!("temperature {temperature} K")));
    }
    if temperature == 0.0 {
        return Ok(1.0);
    }
    if f == 0.0 {
        return Err(Error::InvalidParameter(
            "thermal factor diverges at f = 0 for T > 0".into(),
        ));
    }
    let x = PLANCK_H * f.abs() * HZ_PER_THZ / (2.0 * K_B * temperature);
    Ok(1.0 / x.tanh())
}

/// A correlator evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSample {
    pub r: Vec3,
    pub r_prime: Vec3,
    pub f: f64,
}

impl CorrelatorSample {
    pub fn correlation(&self, model: &DielectricModel) -> Result<f64> {
        correlation_c(model, self.r, self.r_prime, self.f)
    }

    pub fn response(&self, model: &DielectricModel) -> Result<Complex64> {
        response_r(model, self.r, self.r_prime, self.f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> DielectricModel {
        DielectricModel::default()
    }

    #[test]
    fn far_field_longitudinal_and_transverse() {
        let m = model();
        let f = 2.0;
        let k = wavenumber(&m, f);
        let r = 2e4;
        // along x the bracket vanishes as kR -> ∞
        let d = green_xx_closed_form(&m, [r, 0.0, 0.0], f).unwrap();
        let g = (I * k * r).exp() / (4.0 * PI * r);
        assert!((d / g).norm() < 1e-3);
        // along z the bracket tends to 1
        let d = green_xx_closed_form(&m, [0.0, 0.0, r], f).unwrap();
        assert!((d / g - 1.0).norm() < 1e-3);
    }

    #[test]
    fn closed_form_rejects_coincidence() {
        assert!(matches!(
            green_xx_closed_form(&model(), [0.0; 3], 1.0),
            Err(Error::Coincidence)
        ));
        assert!(matches!(
            response_r(&model(), [1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 1.0),
            Err(Error::Coincidence)
        ));
    }

    #[test]
    fn im_path_agrees_with_closed_form() {
        let m = model();
        for &(sep, f) in &[
            ([12.0, -3.0, 40.0], 0.7),
            ([50.0, 0.0, 0.0], 2.5),
            ([3.0, 8.0, -1.0], 4.4),
            ([30.0, 30.0, 100.0], 5.6),
        ] {
            let a = green_xx_closed_form(&m, sep, f).unwrap().im;
            let b = green_xx_im(&m, sep, f).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-12), "{a} {b}");
        }
    }

    #[test]
    fn coincidence_limit_lossless() {
        let m = model().lossless();
        let f = 1.0;
        let k = wavenumber(&m, f).re;
        let expect = green_xx_im_coincidence(&m, f);
        assert!((expect - k / (6.0 * PI)).abs() < 1e-15);
        for dir in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.0, 0.8]] {
            let r = 0.01 / k;
            let sep = [dir[0] * r, dir[1] * r, dir[2] * r];
            let v = green_xx_im(&m, sep, f).unwrap();
            assert!((v / expect - 1.0).abs() < 1e-3, "{dir:?}: {v} vs {expect}");
        }
    }

    #[test]
    fn coincidence_examples() {
        let m = model();
        assert_eq!(green_xx_im_coincidence(&m, 0.0), 0.0);
        let lossless = m.lossless();
        let v = green_xx_im_coincidence(&lossless, 1.0);
        let n = lossless.refractive_index(1.0).unwrap().re;
        assert!((v - n * (2.0 * PI / C_UM_PER_PS) / (6.0 * PI)).abs() < 1e-16);
        let ratio = green_xx_im_coincidence(&m, 2.0) / green_xx_im_coincidence(&m, 1.0);
        assert!(ratio > 2.0 && ratio < 2.1);
    }

    #[test]
    fn weyl_weight_on_axis() {
        let m = model();
        let f = 1.3;
        let dz = 25.0;
        let k = wavenumber(&m, f);
        let w = green_xx_weyl(&m, [0.0, 0.0], dz, f).unwrap();
        let expect = I / (8.0 * PI * PI) * (I * k * dz).exp() / k;
        assert!((w - expect).norm() < 1e-15 * expect.norm());
    }

    #[test]
    fn weyl_weight_refuses_branch_point() {
        let m = model().lossless();
        let k = wavenumber(&m, 1.0).re;
        assert!(green_xx_weyl(&m, [k, 0.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn weyl_matches_closed_form_at_reference_points() {
        let m = model();
        let tol = Tolerance {
            rel: 1e-8,
            ..Default::default()
        };
        for &(sep, f) in &[([50.0, 0.0, 0.0], 1.0), ([0.0, 0.0, 100.0], 2.5)] {
            let w = green_xx_weyl_integrated(&m, sep, f, tol).unwrap();
            let c = green_xx_closed_form(&m, sep, f).unwrap();
            let rel = (w.value - c).norm() / c.norm();
            assert!(rel < 1e-6, "{sep:?} {f}: rel {rel:e}");
        }
    }

    #[test]
    fn static_response_limit() {
        let m = model();
        let r0 = response_r(&m, [30.0, 0.0, 0.0], [0.0; 3], 0.0).unwrap();
        let r1 = response_r(&m, [30.0, 0.0, 0.0], [0.0; 3], 1e-6).unwrap();
        assert!((r0 - r1).norm() < 1e-6 * r0.norm());
        // ∂x²(1/4πR) along x is 2/(4πR³)
        let expect = MU_0 * C_UM_PER_PS.powi(2) / m.static_permittivity() * 2.0
            / (4.0 * PI * 30f64.powi(3))
            / (2.0 * PI);
        assert!((r0.re - expect).abs() < 1e-12 * expect && r0.im.abs() < 1e-20);
    }

    #[test]
    fn correlation_properties() {
        let m = model();
        let a = [1.0, 2.0, 3.0];
        let b = [-20.0, 5.0, 60.0];
        for &f in &[0.3, 1.7, 4.2] {
            let c = correlation_c(&m, a, b, f).unwrap();
            assert_eq!(c, correlation_c(&m, a, b, -f).unwrap());
            assert_eq!(c, correlation_c(&m, b, a, f).unwrap());
            let r = response_r(&m, a, b, f).unwrap();
            assert!((HBAR * r.im - c).abs() <= 1e-12 * c.abs());
            assert_eq!(r, response_r(&m, b, a, f).unwrap());
            assert!(correlation_c(&m, a, a, f).unwrap() > 0.0);
        }
        assert_eq!(correlation_c(&m, a, b, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn thermal_factor_limits() {
        assert_eq!(thermal_factor(1.0, 0.0).unwrap(), 1.0);
        let x = thermal_factor(1.0, 4.0).unwrap();
        assert!((x - 1.0).abs() < 1e-3);
        let t = 3000.0;
        let f = 0.01;
        let classical = 2.0 * K_B * t / (PLANCK_H * f * HZ_PER_THZ);
        assert!((thermal_factor(f, t).unwrap() / classical - 1.0).abs() < 1e-4);
        assert!(thermal_factor(0.0, 4.0).is_err());
        assert!(thermal_factor(1.0, -1.0).is_err());
    }
}
