//! Physical constants and the internal unit system.
//!
//! Lengths are in micrometres, times in picoseconds and frequencies in THz
//! (so `2π f` is an angular frequency in rad/ps). The quantum prefactors
//! `ħ` and `μ₀` are kept in SI; the resulting correlator scale is internally
//! consistent but uncalibrated.

use std::f64::consts::PI;

/// Vacuum speed of light in µm/ps.
pub const C_UM_PER_PS: f64 = 299.792_458;

/// Reduced Planck constant [J s] (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Planck constant [J s] (exact).
pub const PLANCK_H: f64 = 6.626_070_15e-34;

/// Boltzmann constant [J/K] (exact).
pub const K_B: f64 = 1.380_649e-23;

/// Vacuum permeability [N/A²] (CODATA 2018).
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Hz per THz.
pub const HZ_PER_THZ: f64 = 1e12;

/// Femtoseconds per picosecond.
pub const FS_PER_PS: f64 = 1e3;

/// Angular frequency [rad/ps] for an ordinary frequency in THz.
#[inline]
pub fn angular(f_thz: f64) -> f64 {
    2.0 * PI * f_thz
}

/// Vacuum wavenumber `2π f / c` in rad/µm.
#[inline]
pub fn vacuum_wavenumber(f_thz: f64) -> f64 {
    angular(f_thz) / C_UM_PER_PS
}
