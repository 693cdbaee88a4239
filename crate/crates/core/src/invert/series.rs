//! Division of the channel Fourier-Bessel transforms by the boundary values
//! of the Dirichlet eigenfunctions, followed by the inverse transform.

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::phantom::PolarField;
use crate::range::HarmonicSpectrum;
use crate::specfun::quadrature::{gauss_legendre, simpson_weights};
use crate::specfun::{bessel_zeros, normalized_j, Order, MAX_ZEROS};

/// Nodes closer than this to a zero of the denominator are moved away from it.
pub const ZERO_SHIFT: f64 = 1e-3;

/// A channel's λ range ends once `|ĝ|` stays below the cutoff over this width.
pub const QUIET_WIDTH: f64 = 10.0;

/// A channel's λ range ends where `|ĝ|` falls below this multiple of its noise floor.
pub const NOISE_MARGIN: f64 = 100.0;

/// Settings of [`series_inversion`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Radial grid of the reconstruction.
    pub r_grid: UniformGrid,
    /// Width of the Gauss-Legendre panels in λ.
    pub panel_width: f64,
    /// Nodes per panel.
    pub panel_nodes: usize,
    /// Upper bound of the λ integral; `None` selects the resolvable band
    /// `π / (2 h_t)` of the data. Each channel stops earlier, see [`QUIET_WIDTH`].
    pub lambda_max: Option<f64>,
    /// A channel's λ range ends where `|ĝ|` stays below this fraction of its maximum.
    pub cutoff: f64,
    /// Denominators `|j_q(λ)|` below this value are clamped and flagged.
    pub floor: f64,
    /// Whether each channel's λ range adapts to its data. A fixed range
    /// keeps the reconstruction exactly linear in the data.
    pub adaptive: bool,
}

impl SeriesOptions {
    pub fn new(n_r: usize) -> Result<Self> {
        Ok(SeriesOptions {
            r_grid: UniformGrid::new(0.0, 1.0, n_r)?,
            panel_width: 1.0,
            panel_nodes: 12,
            lambda_max: None,
            cutoff: 1e-9,
            floor: 1e-12,
            adaptive: true,
        })
    }
}

/// Per-channel division diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionSpectra {
    /// `(m, l)` in basis order.
    pub channels: Vec<(usize, usize)>,
    /// λ nodes after shifting, shared by all channels.
    pub lambda: Vec<f64>,
    /// `b_l(λ_q)` per channel.
    pub b: Vec<Vec<f64>>,
    /// Upper end of the λ range used per channel.
    pub lambda_end: Vec<f64>,
    /// `max |λ^m j_{n/2−1+m}(λ)|^{-1}` over the nodes used per channel.
    pub max_inverse_denominator: Vec<f64>,
    /// Channels where a denominator fell below the floor.
    pub flagged: Vec<(usize, usize)>,
    /// Nodes that were shifted away from a zero.
    pub shifted_nodes: usize,
}

/// `π / (2 h_t)`: the largest frequency sampled with at least four points per period.
pub fn resolvable_band(t_grid: &UniformGrid) -> f64 {
    std::f64::consts::FRAC_PI_2 / t_grid.step()
}

/// `1 / (2^{2p} Γ(p+1)²)` with `p = n/2 − 1`: the inverse Fourier-Bessel constant,
/// which is also the constant of the eigenfunction expansion for every degree.
pub fn inversion_constant(n: usize) -> f64 {
    let p = n as f64 / 2.0 - 1.0;
    (-(2.0 * p * std::f64::consts::LN_2 + 2.0 * ln_gamma(p + 1.0))).exp()
}

/// Reconstructs the harmonic coefficients of `f` on `opts.r_grid` from a boundary spectrum:
/// `f_{l,m}(r) = K ∫_0^Λ ĝ_{m,l}(λ) r^m j_q(λr)/j_q(λ) λ^{n−1} dλ`, `q = n/2 − 1 + m`.
pub fn series_inversion(spec: &HarmonicSpectrum, opts: &SeriesOptions) -> Result<(PolarField, InversionSpectra)> {
    if opts.panel_nodes < 2 || !(opts.panel_width > 0.0) {
        return Err(Error::InvalidArgument("λ panels need width > 0 and ≥ 2 nodes".into()));
    }
    let n = spec.n;
    let lambda_max = opts.lambda_max.unwrap_or_else(|| resolvable_band(&spec.t_grid));
    let panels = (lambda_max / opts.panel_width).ceil() as usize;
    let rule = gauss_legendre(opts.panel_nodes);
    let base: Vec<f64> = (0..panels)
        .flat_map(|k| {
            let a = k as f64 * opts.panel_width;
            rule.mapped(a, a + opts.panel_width).nodes
        })
        .collect();
    let base_w: Vec<f64> = (0..panels)
        .flat_map(|k| {
            let a = k as f64 * opts.panel_width;
            rule.mapped(a, a + opts.panel_width).weights
        })
        .collect();

    let p0 = Order::harmonic(n, 0)?;
    let tg = spec.t_grid;
    let sw = simpson_weights(tg.len, tg.step());
    let tw: Vec<f64> = (0..tg.len).map(|j| sw[j] * tg.value(j).powi(n as i32 - 1)).collect();
    let row = |lam: f64| -> Vec<f64> { (0..tg.len).map(|j| tw[j] * normalized_j(p0, lam * tg.value(j))).collect() };
    let mut kernel: Vec<Vec<f64>> = base.par_iter().map(|&lam| row(lam)).collect();
    let dot = |k: &[f64], g: &[f64]| k.iter().zip(g).map(|(a, b)| a * b).sum::<f64>();

    // λ range per channel: up to the last panel where |ĝ| exceeds the cutoff.
    let ends: Vec<usize> = spec
        .channels
        .par_iter()
        .map(|g| {
            let ghat: Vec<f64> = kernel.iter().map(|k| dot(k, g)).collect();
            let scale = ghat.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if scale == 0.0 {
                return 0;
            }
            if !opts.adaptive {
                return base.len();
            }
            // Noise floor: median |ĝ| over the top quarter of the band.
            let mut top: Vec<f64> = ghat[3 * ghat.len() / 4..].iter().map(|v| v.abs()).collect();
            top.sort_by(f64::total_cmp);
            let floor = top.get(top.len() / 2).copied().unwrap_or(0.0);
            let threshold = (opts.cutoff * scale).max(NOISE_MARGIN * floor);
            // Last node above the threshold before a quiet stretch of width QUIET_WIDTH.
            let mut last = 0;
            for (i, v) in ghat.iter().enumerate() {
                if v.abs() > threshold {
                    last = i;
                } else if base[i] - base[last] > QUIET_WIDTH {
                    break;
                }
            }
            (((last / opts.panel_nodes) + 1) * opts.panel_nodes).min(base.len())
        })
        .collect();
    let used = ends.iter().copied().max().unwrap_or(0);
    let lambda_used = base.get(used.saturating_sub(1)).copied().unwrap_or(0.0);

    // Move nodes that fall within ZERO_SHIFT of a zero of any denominator J_q.
    let mut zeros: Vec<f64> = Vec::new();
    if used > 0 {
        for m in 0..=spec.m_max {
            let q = Order::harmonic(n, m)?;
            let estimate = ((lambda_used + 2.0) / std::f64::consts::PI).ceil() as usize + 1;
            zeros.extend(bessel_zeros(q, estimate.clamp(1, MAX_ZEROS))?);
        }
    }
    zeros.sort_by(f64::total_cmp);
    let mut shifted_nodes = 0;
    let mut lambda = base.clone();
    for (i, l) in lambda.iter_mut().enumerate().take(used) {
        let k = zeros.partition_point(|&z| z < *l);
        let near = [k.checked_sub(1), Some(k)]
            .into_iter()
            .flatten()
            .filter_map(|j| zeros.get(j))
            .find(|&&z| (*l - z).abs() < ZERO_SHIFT)
            .copied();
        if let Some(z) = near {
            shifted_nodes += 1;
            *l = if *l >= z { z + ZERO_SHIFT } else { z - ZERO_SHIFT };
            kernel[i] = row(*l);
        }
    }

    let basis = spec.basis();
    let k_const = inversion_constant(n);
    let r_grid = opts.r_grid;
    let results: Vec<(Vec<f64>, Vec<f64>, f64, f64, bool)> = basis
        .channels()
        .par_iter()
        .enumerate()
        .map(|(c, &(m, _))| {
            let g = &spec.channels[c];
            let q = Order::harmonic(n, m).expect("valid");
            let end = ends[c];
            let mut field = vec![0.0; r_grid.len];
            if end == 0 {
                return (field, vec![0.0; lambda.len()], 0.0, 0.0, false);
            }
            let ghat: Vec<f64> = kernel[..end].iter().map(|k| dot(k, g)).collect();
            let mut b = vec![0.0; lambda.len()];
            let mut max_inv = 0.0f64;
            let mut flagged = false;
            for i in 0..end {
                let lam = lambda[i];
                let mut den = normalized_j(q, lam);
                if den.abs() < opts.floor {
                    flagged = true;
                    den = opts.floor.copysign(if den == 0.0 { 1.0 } else { den });
                }
                // b_l(λ) = ĝ / (λ^m j_q(λ)); the factor λ^m cancels against the numerator below.
                let ratio = ghat[i] / den;
                b[i] = ratio / lam.powi(m as i32);
                max_inv = max_inv.max(1.0 / (lam.powi(m as i32) * den).abs());
                let wl = base_w[i] * ratio * lam.powi(n as i32 - 1);
                for (ir, f) in field.iter_mut().enumerate() {
                    let r = r_grid.value(ir);
                    *f += wl * r.powi(m as i32) * normalized_j(q, lam * r);
                }
            }
            field.iter_mut().for_each(|v| *v *= k_const);
            (field, b, lambda.get(end.saturating_sub(1)).copied().unwrap_or(0.0), max_inv, flagged)
        })
        .collect();

    let mut out = PolarField::zeros(n, spec.m_max, r_grid)?;
    let mut spectra = InversionSpectra {
        channels: basis.channels().to_vec(),
        lambda,
        b: Vec::with_capacity(results.len()),
        lambda_end: Vec::new(),
        max_inverse_denominator: Vec::new(),
        flagged: Vec::new(),
        shifted_nodes,
    };
    for (c, (field, b, end, inv, flagged)) in results.into_iter().enumerate() {
        if field.iter().any(|v| !v.is_finite()) {
            let (m, l) = basis.channels()[c];
            return Err(Error::NonFinite { m, l, t: 0.0 });
        }
        out.coeffs[c] = field;
        spectra.b.push(b);
        spectra.lambda_end.push(end);
        spectra.max_inverse_denominator.push(inv);
        if flagged {
            spectra.flagged.push(basis.channels()[c]);
        }
    }
    Ok((out, spectra))
}
