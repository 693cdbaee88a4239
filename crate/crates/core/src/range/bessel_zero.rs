//! Vanishing of the channel Fourier-Bessel transforms at the Dirichlet
//! eigenvalues of the ball.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::specfun::quadrature::simpson_weights;
use crate::specfun::{bessel_zeros, harmonic_count, normalized_j, Order};

use super::spectrum::HarmonicSpectrum;

/// Channels with L2 norm below this fraction of the largest channel norm are not checked.
pub const NEGLIGIBLE_CHANNEL: f64 = 1e-10;

/// Points of the uniform λ grid used for the maximum of `|ĝ|`.
pub const LAMBDA_SAMPLES: usize = 1024;

/// Ratio of the λ grid end to the largest zero checked.
pub const LAMBDA_HEADROOM: f64 = 1.25;

/// `ĝ_{m,l}` of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSamples {
    pub m: usize,
    pub l: usize,
    /// `ĝ_{m,l}` on the λ grid.
    pub on_grid: Vec<f64>,
    /// `ĝ_{m,l}(λ_{m,j})` for the first zeros of `J_{m+n/2−1}`.
    pub at_zeros: Vec<f64>,
    /// Whether the channel carries non-negligible energy.
    pub significant: bool,
}

/// `ĝ_{m,l}(λ) = ∫ g_{l,m}(t) j_{n/2−1}(λt) t^{n−1} dt` on a λ grid and at the Bessel zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSamples {
    pub n: usize,
    pub lambda_grid: UniformGrid,
    /// First zeros of `J_{m+n/2−1}`, indexed by `m`.
    pub zeros: Vec<Vec<f64>>,
    pub channels: Vec<ChannelSamples>,
}

/// Residual of one `(m, l, j)` triple.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselZeroResidual {
    pub m: usize,
    pub l: usize,
    /// One-based zero index.
    pub j: usize,
    pub lambda: f64,
    /// `ĝ_{m,l}(λ_{m,j})`.
    pub raw: f64,
    /// `|ĝ(λ_{m,j})| / max_λ |ĝ|`, or `None` for a channel with negligible energy.
    pub value: Option<f64>,
}

/// Computes [`SpectralSamples`] with `count` zeros per order.
pub fn spectral_samples(spec: &HarmonicSpectrum, count: usize) -> Result<SpectralSamples> {
    let n = spec.n;
    let p0 = Order::harmonic(n, 0)?;
    let zeros: Vec<Vec<f64>> = (0..=spec.m_max)
        .map(|m| bessel_zeros(Order::harmonic(n, m)?, count))
        .collect::<Result<_>>()?;
    let top = zeros.iter().filter_map(|z| z.last()).cloned().fold(0.0, f64::max);
    let h = spec.t_grid.step();
    if top * h > std::f64::consts::FRAC_PI_2 {
        return Err(Error::GridTooCoarse(format!(
            "zero λ = {top:.3} exceeds the resolvable band of the time step {h:.3e}"
        )));
    }
    let lambda_grid = UniformGrid::new(0.0, (LAMBDA_HEADROOM * top).max(1.0), LAMBDA_SAMPLES)?;
    let w = simpson_weights(spec.t_grid.len, h);
    let tw: Vec<f64> = (0..spec.t_grid.len)
        .map(|j| w[j] * spec.t_grid.value(j).powi(n as i32 - 1))
        .collect();
    let kernel = |lam: f64| -> Vec<f64> {
        (0..spec.t_grid.len)
            .map(|j| tw[j] * normalized_j(p0, lam * spec.t_grid.value(j)))
            .collect()
    };
    let grid_kernel: Vec<Vec<f64>> = (0..lambda_grid.len).into_par_iter().map(|i| kernel(lambda_grid.value(i))).collect();
    let zero_kernel: Vec<Vec<Vec<f64>>> = zeros.iter().map(|zs| zs.iter().map(|&z| kernel(z)).collect()).collect();
    let norms: Vec<f64> = spec.channel_energies().iter().map(|e| e.sqrt()).collect();
    let top_norm = norms.iter().cloned().fold(0.0, f64::max);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let channels = spec
        .basis()
        .channels()
        .par_iter()
        .enumerate()
        .map(|(k, &(m, l))| {
            let g = &spec.channels[k];
            ChannelSamples {
                m,
                l,
                on_grid: grid_kernel.iter().map(|kr| dot(kr, g)).collect(),
                at_zeros: zero_kernel[m].iter().map(|kr| dot(kr, g)).collect(),
                significant: top_norm > 0.0 && norms[k] > NEGLIGIBLE_CHANNEL * top_norm,
            }
        })
        .collect();
    Ok(SpectralSamples { n, lambda_grid, zeros, channels })
}

/// Residuals `|ĝ_{m,l}(λ_{m,j})| / max_λ |ĝ_{m,l}|` for the first `count` zeros of every order.
pub fn check_bessel_zeros(spec: &HarmonicSpectrum, count: usize) -> Result<Vec<BesselZeroResidual>> {
    Ok(bessel_zero_residuals(&spectral_samples(spec, count)?))
}

/// Residual table from precomputed samples.
pub fn bessel_zero_residuals(samples: &SpectralSamples) -> Vec<BesselZeroResidual> {
    let mut out = Vec::new();
    for c in &samples.channels {
        let scale = c.on_grid.iter().chain(&c.at_zeros).fold(0.0f64, |a, v| a.max(v.abs()));
        for (j, (&raw, &lambda)) in c.at_zeros.iter().zip(&samples.zeros[c.m]).enumerate() {
            let value = (c.significant && scale > 0.0).then(|| raw.abs() / scale);
            out.push(BesselZeroResidual { m: c.m, l: c.l, j: j + 1, lambda, raw, value });
        }
    }
    out
}

/// Window `sin²(πt/T)` used by the perturbation fixtures.
pub fn window(t: f64, t_max: f64) -> f64 {
    (std::f64::consts::PI * t / t_max).sin().powi(2)
}

/// Adds `amp · j_{n/2−1}(λ_{m,j} t) · window(t)` to channel `(m, l)`, a
/// perturbation whose transform does not vanish at the zero `λ_{m,j}`.
pub fn perturb_at_zero(spec: &mut HarmonicSpectrum, m: usize, l: usize, j: usize, amp: f64) -> Result<f64> {
    check_channel(spec, m, l)?;
    if j == 0 {
        return Err(Error::InvalidArgument("zero index is one-based".into()));
    }
    let n = spec.n;
    let lambda = bessel_zeros(Order::harmonic(n, m)?, j)?[j - 1];
    let p0 = Order::harmonic(n, 0)?;
    let grid = spec.t_grid;
    for (i, v) in spec.channel_mut(m, l).iter_mut().enumerate() {
        let t = grid.value(i);
        *v += amp * normalized_j(p0, lambda * t) * window(t, grid.end);
    }
    Ok(lambda)
}

/// Adds a Gaussian bump `amp · exp(−((t − t0)/width)²)` to channel `(m, l)`.
pub fn perturb_bump(spec: &mut HarmonicSpectrum, m: usize, l: usize, amp: f64, t0: f64, width: f64) -> Result<()> {
    check_channel(spec, m, l)?;
    if !(width > 0.0) {
        return Err(Error::InvalidArgument(format!("bump width {width} must be positive")));
    }
    let grid = spec.t_grid;
    for (i, v) in spec.channel_mut(m, l).iter_mut().enumerate() {
        let s = (grid.value(i) - t0) / width;
        *v += amp * (-s * s).exp();
    }
    Ok(())
}

fn check_channel(spec: &HarmonicSpectrum, m: usize, l: usize) -> Result<()> {
    if m > spec.m_max || l == 0 || l > harmonic_count(spec.n, m) {
        return Err(Error::HarmonicIndex { n: spec.n, m, l });
    }
    Ok(())
}
