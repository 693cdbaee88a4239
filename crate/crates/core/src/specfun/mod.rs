//! Special functions: Bessel functions and zeros, spherical harmonics, quadrature.

mod bessel;
mod harmonics;
pub mod quadrature;
mod zeros;

pub use bessel::{bessel_j, normalized_j, normalized_j_derivative, Order, SeriesCoeffs};
pub use harmonics::{eval_harmonic, harmonic_count, legendre_p, HarmonicBasis, HarmonicIndex};
pub use zeros::{bessel_zeros, mcmahon_estimate, MAX_ZEROS};

/// `d/dr [(λr)^m j_p(λr)]` with `p = n/2 − 1 + m`, the radial factor of the
/// Dirichlet eigenfunctions of the ball.
pub fn eigen_radial_derivative(n: usize, m: usize, lambda: f64, r: f64) -> f64 {
    let p = Order::harmonic(n, m).expect("valid harmonic order");
    let z = lambda * r;
    let mut v = z.powi(m as i32) * normalized_j_derivative(p, z);
    if m > 0 {
        v += m as f64 * z.powi(m as i32 - 1) * normalized_j(p, z);
    }
    lambda * v
}

/// `(λr)^m j_p(λr)` with `p = n/2 − 1 + m`.
pub fn eigen_radial(n: usize, m: usize, lambda: f64, r: f64) -> f64 {
    let p = Order::harmonic(n, m).expect("valid harmonic order");
    let z = lambda * r;
    z.powi(m as i32) * normalized_j(p, z)
}
