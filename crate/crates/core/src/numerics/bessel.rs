//! Bessel functions of the first kind for integer order and real argument.
//!
//! Small and moderate arguments use the trapezoidal rule on Bessel's
//! integral, which converges geometrically once the node count exceeds the
//! argument. Large arguments use the Hankel asymptotic series.

use std::f64::consts::PI;

const ASYMPTOTIC_FROM: f64 = 60.0;

/// `J_n(x)` for integer `n >= 0`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j(n, -x);
        return if n.is_multiple_of(2) { v } else { -v };
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x >= ASYMPTOTIC_FROM && (n as f64) < 0.1 * x {
        return match n {
            0 => hankel_asymptotic(0, x),
            1 => hankel_asymptotic(1, x),
            _ => {
                // upward recurrence is stable while n < x
                let mut jm = hankel_asymptotic(0, x);
                let mut j = hankel_asymptotic(1, x);
                for k in 1..n {
                    let next = 2.0 * k as f64 / x * j - jm;
                    jm = j;
                    j = next;
                }
                j
            }
        };
    }
    trapezoid(n, x)
}

/// `(J_0(x), J_2(x))`, the pair needed for the xx angular integral.
pub fn bessel_j0_j2(x: f64) -> (f64, f64) {
    if x.abs() >= ASYMPTOTIC_FROM {
        let j0 = hankel_asymptotic(0, x.abs());
        let j1 = hankel_asymptotic(1, x.abs());
        return (j0, 2.0 * j1 / x.abs() - j0);
    }
    if x == 0.0 {
        return (1.0, 0.0);
    }
    let m = x.abs().ceil() as usize + 40;
    let h = PI / m as f64;
    // integrand is even about 0 and pi; use the half-period sum
    let mut s0 = 0.0;
    let mut s2 = 0.0;
    for j in 0..=m {
        let theta = h * j as f64;
        let wt = if j == 0 || j == m { 0.5 } else { 1.0 };
        let phase = x * theta.sin();
        s0 += wt * phase.cos();
        s2 += wt * (2.0 * theta - phase).cos();
    }
    (s0 / m as f64, s2 / m as f64)
}

fn trapezoid(n: u32, x: f64) -> f64 {
    let m = x.ceil() as usize + n as usize + 40;
    let h = PI / m as f64;
    let mut s = 0.0;
    for j in 0..=m {
        let theta = h * j as f64;
        let wt = if j == 0 || j == m { 0.5 } else { 1.0 };
        s += wt * (n as f64 * theta - x * theta.sin()).cos();
    }
    s / m as f64
}

fn hankel_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64).powi(2);
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 0usize;
    loop {
        // term = a_k / x^k with a_k = prod_{j<=k} (mu - (2j-1)^2) / (k! 8^k)
        let contrib = term;
        match k % 4 {
            0 => p += contrib,
            1 => q += contrib,
            2 => p -= contrib,
            _ => q -= contrib,
        }
        k += 1;
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() < 1e-17 * p.abs().max(1e-300) || next.abs() > term.abs() || k > 60 {
            break;
        }
        term = next;
    }
    let chi = x - (n as f64 / 2.0 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
