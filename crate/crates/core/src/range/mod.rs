//! Range conditions of the spherical mean transform as residual tests.

mod bessel_zero;
mod boundary;
mod moments;
mod orthogonality;
mod poly;
mod report;
mod spectrum;

pub use bessel_zero::{
    bessel_zero_residuals, check_bessel_zeros, perturb_at_zero, perturb_bump, spectral_samples, window,
    BesselZeroResidual, ChannelSamples, SpectralSamples, LAMBDA_SAMPLES, NEGLIGIBLE_CHANNEL,
};
pub use boundary::GeneralBoundary;
pub use moments::{
    channel_moment, check_growth, check_moment_ball, check_moment_ball_with_floor, check_recurrence, growth_of,
    moment_polynomials, quadrature_moment_polynomials, recurrence_constant, recurrence_residuals, sampled_moments,
    taylor_coefficients, GrowthEstimate, MomentFit, MomentResidual, MomentSet, DEFAULT_ENERGY_FLOOR, MAX_K,
};
pub use orthogonality::{check_orthogonality, eigensolutions, EigenSolution, OrthogonalityResidual};
pub use poly::{fit_polynomial, fit_with_laplacian, monomials, Poly, PolyFit};
pub use report::{range_report, ConditionSummary, RangeConfig, RangeReport, DEFAULT_GROWTH_BOUND, DEFAULT_THRESHOLD};
pub use spectrum::{boundary_energy, harmonic_decompose, synthesize_boundary, HarmonicSpectrum};
