//! Numerical building blocks: quadrature rules, Bessel functions, cubic
//! splines and FFT helpers in the project Fourier convention.

pub mod bessel;
pub mod fft;
pub mod quad;
pub mod spline;
