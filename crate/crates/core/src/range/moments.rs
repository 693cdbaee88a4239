//! Moment conditions: vanishing of high-degree channel moments on the ball,
//! polynomial extension of the center moments `M_k`, the Laplacian recurrence
//! and the growth estimate.

use crate::error::{Error, Result};
use crate::forward::BoundaryData;
use crate::phantom::Phantom;
use crate::specfun::quadrature::simpson_weights;
use crate::specfun::{harmonic_count, Order, SeriesCoeffs};

use super::boundary::GeneralBoundary;
use super::poly::{fit_polynomial, fit_with_laplacian, monomials, Poly, PolyFit};
use super::spectrum::HarmonicSpectrum;

/// Largest `k` accepted by the moment checks.
pub const MAX_K: usize = 12;

/// Channels whose L2 norm is below this fraction of the largest channel norm
/// are normalized by that floor instead of their own norm.
pub const DEFAULT_ENERGY_FLOOR: f64 = 1e-10;

/// Normalized residual of one `(k, m, l)` moment with `m > 2k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentResidual {
    pub k: usize,
    pub m: usize,
    pub l: usize,
    /// `∫ t^{2k+n−1} g_{l,m}(t) dt`.
    pub moment: f64,
    /// `|moment| / (‖g_{l,m}‖ T^{2k+n})`.
    pub value: f64,
}

fn channel_norms(spec: &HarmonicSpectrum) -> Vec<f64> {
    spec.channel_energies().iter().map(|e| e.sqrt()).collect()
}

/// `∫_0^T t^{2k+n−1} g_{l,m}(t) dt` by Simpson.
pub fn channel_moment(spec: &HarmonicSpectrum, m: usize, l: usize, k: usize) -> f64 {
    let w = simpson_weights(spec.t_grid.len, spec.t_grid.step());
    let e = (2 * k + spec.n - 1) as i32;
    spec.channel(m, l)
        .iter()
        .enumerate()
        .map(|(j, v)| w[j] * v * spec.t_grid.value(j).powi(e))
        .sum()
}

/// Residuals for every `(k, m, l)` with `k ≤ k_max`, `m > 2k`.
pub fn check_moment_ball(spec: &HarmonicSpectrum, k_max: usize) -> Result<Vec<MomentResidual>> {
    check_moment_ball_with_floor(spec, k_max, DEFAULT_ENERGY_FLOOR)
}

pub fn check_moment_ball_with_floor(spec: &HarmonicSpectrum, k_max: usize, floor: f64) -> Result<Vec<MomentResidual>> {
    if k_max > MAX_K {
        return Err(Error::InvalidArgument(format!("k_max {k_max} exceeds {MAX_K}")));
    }
    let norms = channel_norms(spec);
    let top = norms.iter().cloned().fold(0.0, f64::max);
    let basis = spec.basis();
    let t = spec.t_grid.end;
    let mut out = Vec::new();
    for k in 0..=k_max {
        for m in (2 * k + 1)..=spec.m_max {
            for l in 1..=harmonic_count(spec.n, m) {
                let moment = channel_moment(spec, m, l, k);
                let scale = norms[basis.index_of(m, l)].max(floor * top);
                let value = if scale == 0.0 { 0.0 } else { moment.abs() / (scale * t.powi((2 * k + spec.n) as i32)) };
                out.push(MomentResidual { k, m, l, moment, value });
            }
        }
    }
    Ok(out)
}

/// Even Taylor coefficients `a_k` of `ĝ_{m,l}(λ) = Σ a_k λ^{2k}`, where
/// `a_k = C_k ∫ t^{2k+n−1} g_{l,m} dt` and `C_k` are the series coefficients of `j_{n/2−1}`.
pub fn taylor_coefficients(spec: &HarmonicSpectrum, m: usize, l: usize, count: usize) -> Vec<f64> {
    let p = Order::harmonic(spec.n, 0).expect("valid order");
    let c = SeriesCoeffs::new(p, count.max(1));
    (0..count).map(|k| c.coeffs[k] * channel_moment(spec, m, l, k)).collect()
}

/// `M_k(x_i) = ∫_0^T t^{2k+n−1} g(x_i, t) dt` at every center.
pub fn sampled_moments(g: &BoundaryData, k: usize) -> Vec<f64> {
    let w = simpson_weights(g.t_grid.len, g.t_grid.step());
    let e = (2 * k + g.n - 1) as i32;
    let tw: Vec<f64> = (0..g.t_grid.len).map(|j| w[j] * g.t_grid.value(j).powi(e)).collect();
    (0..g.centers.len())
        .map(|i| g.row(i).iter().zip(&tw).map(|(v, w)| v * w).sum())
        .collect()
}

/// `c_k = 2k(2k + n − 2)`, so that `Δ|x|^{2k} = c_k |x|^{2k−2}`.
pub fn recurrence_constant(n: usize, k: usize) -> f64 {
    (2 * k * (2 * k + n - 2)) as f64
}

/// Fits of one moment function.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFit {
    pub k: usize,
    /// `M_k` at the boundary samples.
    pub samples: Vec<f64>,
    /// Degree-`≤ 2k` polynomial with `ΔQ_k = c_k Q_{k−1}` imposed.
    pub chained: PolyFit,
    /// Unconstrained degree-`≤ 2k` fit.
    pub free_2k: PolyFit,
    /// Unconstrained degree-`≤ k` fit.
    pub free_k: PolyFit,
}

impl MomentFit {
    pub fn q(&self) -> &Poly {
        &self.chained.poly
    }
}

/// Moment functions and their polynomial fits for `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub n: usize,
    pub k_max: usize,
    pub fits: Vec<MomentFit>,
    /// `c_k` for `k = 0..=k_max` (`c_0 = 0`).
    pub c: Vec<f64>,
}

/// Computes `M_k` on the boundary and fits polynomials of degree `≤ 2k`
/// (chained through the recurrence, and unconstrained) and `≤ k`.
///
/// Requires at least as many samples as monomials of degree `2 k_max`.
pub fn moment_polynomials(g: &BoundaryData, boundary: &GeneralBoundary, k_max: usize) -> Result<MomentSet> {
    if k_max > MAX_K {
        return Err(Error::InvalidArgument(format!("k_max {k_max} exceeds {MAX_K}")));
    }
    let n = g.n;
    let needed = monomials(n, 2 * k_max).len();
    if g.centers.len() < needed {
        return Err(Error::QuadratureOrder { what: "boundary samples for moment fit", required: needed, got: g.centers.len() });
    }
    if g.centers.points != boundary.grid.points {
        return Err(Error::InvalidArgument("boundary data centers differ from the boundary samples".into()));
    }
    let pts = &boundary.grid.points;
    let w = &boundary.grid.weights;
    let mut fits: Vec<MomentFit> = Vec::with_capacity(k_max + 1);
    let mut c = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let samples = sampled_moments(g, k);
        let ck = recurrence_constant(n, k);
        c.push(ck);
        let rhs = match fits.last() {
            Some(prev) => prev.q().combine(ck, &Poly::zero(n, 0), 0.0),
            None => Poly::zero(n, 0),
        };
        let chained = fit_with_laplacian(n, 2 * k, &rhs, pts, w, &samples)?;
        let free_2k = fit_polynomial(n, 2 * k, pts, w, &samples)?;
        let free_k = fit_polynomial(n, k, pts, w, &samples)?;
        fits.push(MomentFit { k, samples, chained, free_2k, free_k });
    }
    Ok(MomentSet { n, k_max, fits, c })
}

fn rms(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

/// `‖ΔQ_k − c_k Q_{k−1}‖ / ‖c_k Q_{k−1}‖` (RMS over `cloud`) for `k = 1..`,
/// with the Laplacian applied to the coefficients.
pub fn recurrence_residuals(n: usize, polys: &[Poly], cloud: &[[f64; 3]]) -> Vec<f64> {
    (1..polys.len())
        .map(|k| {
            let ck = recurrence_constant(n, k);
            let lap = polys[k].laplacian();
            let diff: Vec<f64> = cloud.iter().map(|x| lap.eval(&x[..n]) - ck * polys[k - 1].eval(&x[..n])).collect();
            let base: Vec<f64> = cloud.iter().map(|x| ck * polys[k - 1].eval(&x[..n])).collect();
            let b = rms(&base);
            let d = rms(&diff);
            if b == 0.0 {
                d
            } else {
                d / b
            }
        })
        .collect()
}

/// Recurrence residuals of the chained fits on the domain's interior cloud.
pub fn check_recurrence(ms: &MomentSet, boundary: &GeneralBoundary) -> Vec<f64> {
    let polys: Vec<Poly> = ms.fits.iter().map(|f| f.q().clone()).collect();
    recurrence_residuals(ms.n, &polys, &boundary.interior_cloud())
}

/// `Q_k(x) = ω^{−1} ∫ |x − y|^{2k} f(y) dy` as exact polynomials in `x`,
/// built from the phantom's monomial moments.
pub fn quadrature_moment_polynomials(ph: &Phantom, k_max: usize) -> Vec<Poly> {
    let n = ph.n;
    let omega = if n == 2 { 2.0 * std::f64::consts::PI } else { 4.0 * std::f64::consts::PI };
    let exps = monomials(n, 2 * k_max);
    let mom = ph.monomial_moments(&exps);
    let lookup: std::collections::HashMap<[usize; 3], f64> = exps.iter().cloned().zip(mom).collect();
    (0..=k_max)
        .map(|k| {
            let mut q = Poly::zero(n, 2 * k);
            let idx: std::collections::HashMap<[usize; 3], usize> =
                q.exps.iter().enumerate().map(|(i, e)| (*e, i)).collect();
            for parts in compositions(k, n) {
                let multi = factorial(k) / parts.iter().map(|&p| factorial(p)).product::<f64>();
                // Π_i (x_i − y_i)^{2k_i} = Π_i Σ_{a_i} C(2k_i, a_i) x_i^{a_i} (−y_i)^{2k_i − a_i}.
                let mut stack: Vec<([usize; 3], [usize; 3], f64)> = vec![([0; 3], [0; 3], multi)];
                for i in 0..n {
                    let e = 2 * parts[i];
                    let mut next = Vec::new();
                    for (xa, yb, c) in &stack {
                        for a in 0..=e {
                            let mut xa2 = *xa;
                            let mut yb2 = *yb;
                            xa2[i] = a;
                            yb2[i] = e - a;
                            let sign = if (e - a) % 2 == 0 { 1.0 } else { -1.0 };
                            next.push((xa2, yb2, c * binomial(e, a) * sign));
                        }
                    }
                    stack = next;
                }
                for (xa, yb, c) in stack {
                    q.coeffs[idx[&xa]] += c * lookup[&yb] / omega;
                }
            }
            q
        })
        .collect()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All `n`-part compositions of `k` into nonnegative parts.
fn compositions(k: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in compositions(k - first, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Growth of `max|Q_k|` over the domain samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEstimate {
    /// `max_x |Q_k(x)|` for `k = 0..=k_max`.
    pub max_abs: Vec<f64>,
    /// `(max|Q_k|)^{1/k}` for `k = 1..=k_max` (entry 0 is unused and set to 0).
    pub roots: Vec<f64>,
    /// `M̂ = max_{k ≥ 1} (max|Q_k|)^{1/k}`.
    pub m_hat: f64,
    /// `max_{k ≥ 1} (max|Q_k| / max|Q_0|)^{1/k}`, invariant under scaling of the data.
    pub normalized_m_hat: f64,
    /// Whether `roots` is non-increasing for `k ∈ [2, k_max]`.
    pub tail_non_increasing: bool,
}

/// Growth estimate of the fitted sequence `Q_k` over `samples`.
pub fn check_growth(ms: &MomentSet, samples: &[[f64; 3]]) -> Result<GrowthEstimate> {
    let polys: Vec<Poly> = ms.fits.iter().map(|f| f.q().clone()).collect();
    growth_of(ms.n, &polys, samples)
}

/// Growth estimate for an explicit polynomial sequence.
pub fn growth_of(n: usize, polys: &[Poly], samples: &[[f64; 3]]) -> Result<GrowthEstimate> {
    if polys.len() < 4 {
        return Err(Error::InvalidArgument("growth estimate needs k_max ≥ 3".into()));
    }
    let max_abs: Vec<f64> = polys
        .iter()
        .map(|q| samples.iter().map(|x| q.eval(&x[..n]).abs()).fold(0.0, f64::max))
        .collect();
    let mut roots = vec![0.0; polys.len()];
    for k in 1..polys.len() {
        roots[k] = max_abs[k].powf(1.0 / k as f64);
    }
    let m_hat = roots.iter().skip(1).cloned().fold(0.0, f64::max);
    let normalized_m_hat = if max_abs[0] > 0.0 {
        (1..polys.len()).map(|k| (max_abs[k] / max_abs[0]).powf(1.0 / k as f64)).fold(0.0, f64::max)
    } else {
        0.0
    };
    let tail_non_increasing = (3..polys.len()).all(|k| roots[k] <= roots[k - 1] * (1.0 + 1e-12));
    Ok(GrowthEstimate { max_abs, roots, m_hat, normalized_m_hat, tail_non_increasing })
}
