//! Quadrature rules.
//!
//! [`integrate`] is a globally adaptive Gauss–Kronrod (7/15) integrator over a
//! list of starting panels, for vector-valued complex integrands. The
//! refinement order only depends on the integrand values, so results are
//! reproducible bit for bit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Error floor relative to `∫|f|`, below which cancellation makes the
/// error estimate meaningless.
const ROUNDOFF: f64 = 1e-13;

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 0.0,
            rel: 1e-10,
            max_panels: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<const N: usize> {
    pub value: [Complex64; N],
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Panel carrying the largest error when the tolerance was not met.
    pub worst: (f64, f64),
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [Complex64; N],
    error: f64,
    /// `∫|f|` over the panel, for the roundoff floor.
    l1: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        // ties broken by position so the heap order is total
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn norm<const N: usize>(v: &[Complex64; N]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn gk15<const N: usize, F>(f: &F, a: f64, b: f64) -> Panel<N>
where
    F: Fn(f64) -> [Complex64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let zero = [Complex64::new(0.0, 0.0); N];
    let mut kronrod = zero;
    let mut gauss = zero;

    let fc = f(center);
    let mut l1 = WGK[7] * norm(&fc);
    for n in 0..N {
        kronrod[n] = fc[n] * WGK[7];
        gauss[n] = fc[n] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        l1 += WGK[j] * (norm(&f1) + norm(&f2));
        for n in 0..N {
            let s = f1[n] + f2[n];
            kronrod[n] += s * WGK[j];
            if j % 2 == 1 {
                gauss[n] += s * WG[j / 2];
            }
        }
    }
    let mut diff = zero;
    for n in 0..N {
        kronrod[n] *= half;
        gauss[n] *= half;
        diff[n] = kronrod[n] - gauss[n];
    }
    Panel {
        a,
        b,
        value: kronrod,
        error: norm(&diff),
        l1: l1 * half.abs(),
    }
}

/// Integrates `f` over the union of `panels` (each `(a, b)` with `a < b`).
pub fn integrate<const N: usize, F>(f: F, panels: &[(f64, f64)], tol: Tolerance) -> QuadResult<N>
where
    F: Fn(f64) -> [Complex64; N],
{
    let mut heap: BinaryHeap<Panel<N>> = BinaryHeap::new();
    let mut evaluations = 0;
    for &(a, b) in panels {
        if b > a {
            heap.push(gk15(&f, a, b));
            evaluations += 15;
        }
    }

    let totals = |heap: &BinaryHeap<Panel<N>>| {
        let mut value = [Complex64::new(0.0, 0.0); N];
        let mut error = 0.0;
        let mut l1 = 0.0;
        // sum in position order so the result does not depend on heap layout
        let mut ordered: Vec<&Panel<N>> = heap.iter().collect();
        ordered.sort_by(|p, q| p.a.total_cmp(&q.a));
        for p in ordered {
            for (v, pv) in value.iter_mut().zip(&p.value) {
                *v += pv;
            }
            error += p.error;
            l1 += p.l1;
        }
        (value, error, l1)
    };

    // running sums for the stopping test, refreshed exactly every so often
    let (mut value, mut error, mut l1) = totals(&heap);
    let mut steps = 0usize;
    loop {
        if steps.is_multiple_of(128) {
            (value, error, l1) = totals(&heap);
        }
        steps += 1;
        let target = tol.abs.max(tol.rel * norm(&value)).max(ROUNDOFF * l1);
        let done = error <= target || heap.len() >= tol.max_panels;
        if done {
            (value, error, l1) = totals(&heap);
            let target = tol.abs.max(tol.rel * norm(&value)).max(ROUNDOFF * l1);
            if error <= target || heap.len() >= tol.max_panels {
                let worst = heap.peek().map(|p| (p.a, p.b)).unwrap_or((0.0, 0.0));
                return QuadResult {
                    value,
                    error,
                    evaluations,
                    converged: error <= target,
                    worst,
                };
            }
        }
        let Some(p) = heap.pop() else {
            return QuadResult {
                value,
                error,
                evaluations,
                converged: true,
                worst: (0.0, 0.0),
            };
        };
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // panel can no longer be split in f64
            error -= p.error;
            heap.push(Panel { error: 0.0, ..p });
            continue;
        }
        let left = gk15(&f, p.a, mid);
        let right = gk15(&f, mid, p.b);
        for (n, v) in value.iter_mut().enumerate() {
            *v += left.value[n] + right.value[n] - p.value[n];
        }
        error += left.error + right.error - p.error;
        l1 += left.l1 + right.l1 - p.l1;
        heap.push(left);
        heap.push(right);
        evaluations += 30;
    }
}

/// Splits `[a, b]` into `n` equal panels.
pub fn uniform_panels(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == n { b } else { a + h * (i + 1) as f64 };
            (lo, hi)
        })
        .collect()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss–Hermite nodes and weights for the weight `exp(-x²)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}
