//! Spherical means of phantoms: boundary data `g = Rf` on the center sphere,
//! interior means `G(x, t)` in harmonic form, and the Darboux residual.
//!
//! Means of phantoms are computed in a frame aligned with the center: the
//! polar variable `u = σ·x̂` determines `|x + tσ|`, so the cutoff breakpoints
//! and the exact-zero region are known in closed form. In 3D the azimuthal
//! integral of a Gaussian is done analytically through `I_0`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{CenterGrid, UniformGrid};
use crate::phantom::{norm, Bump, HarmonicTerm, Phantom, PolarField, SmoothCutoff};
use crate::range::HarmonicSpectrum;
use crate::specfun::quadrature::{gauss_legendre, integrate_adaptive, Rule};
use crate::specfun::{harmonic_count, legendre_p, HarmonicBasis};

/// Sampled `g(x_i, t_j)` for centers `x_i` on a boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub n: usize,
    pub centers: CenterGrid,
    pub t_grid: UniformGrid,
    /// Row-major: one row of `t_grid.len` values per center.
    pub values: Vec<f64>,
}

impl BoundaryData {
    pub fn zeros(centers: CenterGrid, t_grid: UniformGrid) -> Self {
        let values = vec![0.0; centers.len() * t_grid.len];
        BoundaryData { n: centers.n, centers, t_grid, values }
    }

    /// `T`, the end of the time grid.
    pub fn t_max(&self) -> f64 {
        self.t_grid.end
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.t_grid.len..(i + 1) * self.t_grid.len]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let nt = self.t_grid.len;
        &mut self.values[i * nt..(i + 1) * nt]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.t_grid.len + j]
    }

    pub fn scaled(&self, s: f64) -> BoundaryData {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Largest `|g|` over samples with `t ≥ t0`.
    pub fn max_abs_beyond(&self, t0: f64) -> f64 {
        let nt = self.t_grid.len;
        (0..self.centers.len())
            .flat_map(|i| (0..nt).map(move |j| (i, j)))
            .filter(|&(_, j)| self.t_grid.value(j) >= t0)
            .map(|(i, j)| self.value(i, j).abs())
            .fold(0.0, f64::max)
    }
}

/// `e^{-x} I_0(x)` for `x ≥ 0`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    if x <= 15.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        let e = 1.0 / (8.0 * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..40 {
            let prev = term;
            let odd = (2 * j - 1) as f64;
            term *= odd * odd * e / j as f64;
            if term > prev || term < 1e-17 {
                break;
            }
            sum += term;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// Frame of a center: radius, unit direction and an orthonormal complement.
struct Frame {
    r: f64,
    axis: [f64; 3],
}

impl Frame {
    fn new(n: usize, x: &[f64]) -> Frame {
        let r = norm(&x[..n]);
        let mut axis = [0.0; 3];
        if r > 0.0 {
            for i in 0..n {
                axis[i] = x[i] / r;
            }
        } else {
            axis[0] = 1.0;
        }
        Frame { r, axis }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Polar-cosine interval where the sphere of radius `t` about a center at
/// radius `r` lies inside the ball of radius `r1`: `u < u_top`.
fn u_threshold(r: f64, t: f64, r1: f64) -> f64 {
    if r == 0.0 || t == 0.0 {
        return if r.max(t) < r1 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    (r1 * r1 - r * r - t * t) / (2.0 * r * t)
}

fn push_break(breaks: &mut Vec<f64>, v: f64, lo: f64, hi: f64) {
    if v.is_finite() && v > lo && v < hi {
        breaks.push(v);
    }
}

/// Adaptive integration over consecutive panels between sorted breakpoints.
fn integrate_panels<F: Fn(f64) -> f64>(f: F, mut breaks: Vec<f64>, abs_tol: f64) -> f64 {
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
        .windows(2)
        .map(|w| integrate_adaptive(&f, w[0], w[1], abs_tol, 1e-13))
        .sum()
}

/// Spherical mean `(1/ω) ∫_S f(x + tσ) dS(σ)` of a phantom.
pub fn spherical_mean(ph: &Phantom, center: &[f64], t: f64) -> f64 {
    let mut total = 0.0;
    for b in &ph.bumps {
        total += bump_mean(ph.n, b, ph.cutoff(), center, t);
    }
    if !ph.harmonics.is_empty() {
        let frame = Frame::new(ph.n, center);
        let basis = HarmonicBasis::new(ph.n, ph.harmonics.iter().map(|h| h.m).max().unwrap_or(0))
            .expect("validated dimension");
        let mut y = vec![0.0; basis.len()];
        basis.eval_into(&frame.axis[..ph.n], &mut y);
        for h in &ph.harmonics {
            total += y[basis.index_of(h.m, h.l)] * harmonic_kernel(ph.n, h, ph.cutoff(), frame.r, t);
        }
    }
    total
}

/// Mean of one Gaussian bump (with the cutoff) over the sphere `|y - x| = t`.
pub(crate) fn bump_mean(n: usize, b: &Bump, cut: SmoothCutoff, x: &[f64], t: f64) -> f64 {
    if b.amplitude == 0.0 {
        return 0.0;
    }
    let frame = Frame::new(n, x);
    let r = frame.r;
    if t == 0.0 {
        let d2: f64 = (0..n).map(|i| (x[i] - b.center[i]).powi(2)).sum();
        return b.amplitude * cut.eval(r) * (-d2 / (b.width * b.width)).exp();
    }
    let u_top = u_threshold(r, t, cut.outer).min(1.0);
    if u_top <= -1.0 {
        return 0.0;
    }
    let u_lo = u_threshold(r, t, cut.inner);
    let w2 = b.width * b.width;
    let v: Vec<f64> = (0..n).map(|i| x[i] - b.center[i]).collect();
    let v_par = dot(&v, &frame.axis[..n]);
    let v_sq = dot(&v, &v);
    let v_perp = (v_sq - v_par * v_par).max(0.0).sqrt();
    let v_norm = v_sq.sqrt();
    let rho = |u: f64| (r * r + t * t + 2.0 * r * t * u).max(0.0).sqrt();
    let tol = 1e-15 * b.amplitude.abs().max(1e-300);
    let ang = b.width / t;
    match n {
        3 => {
            let mut breaks = vec![-1.0, u_top];
            push_break(&mut breaks, u_lo, -1.0, u_top);
            if v_norm > 0.0 {
                let us = -v_par / v_norm;
                let s = (1.0 - us * us).max(0.0).sqrt();
                for k in [-3.0, -1.0, 0.0, 1.0, 3.0] {
                    push_break(&mut breaks, us + k * (ang * s + ang * ang), -1.0, u_top);
                }
            }
            let f = |u: f64| {
                let chi = cut.eval(rho(u));
                if chi == 0.0 {
                    return 0.0;
                }
                let kappa = 2.0 * t * v_perp * (1.0 - u * u).max(0.0).sqrt() / w2;
                let expo = -(v_sq + t * t + 2.0 * t * u * v_par) / w2 + kappa;
                chi * expo.min(0.0).exp() * bessel_i0_scaled(kappa)
            };
            0.5 * b.amplitude * integrate_panels(f, breaks, tol)
        }
        _ => {
            // σ(α) = cos α x̂ + sin α x̂⊥; the integrand is restricted to α ∈ [α_top, 2π − α_top].
            let a_top = u_top.max(-1.0).acos();
            let perp = [-frame.axis[1], frame.axis[0]];
            let (lo, hi) = (a_top, 2.0 * PI - a_top);
            let mut breaks = vec![lo, hi];
            if u_lo > -1.0 && u_lo < 1.0 {
                let a = u_lo.acos();
                push_break(&mut breaks, a, lo, hi);
                push_break(&mut breaks, 2.0 * PI - a, lo, hi);
            }
            push_break(&mut breaks, PI, lo, hi);
            if v_norm > 0.0 {
                let a_star = (-dot(&v, &perp)).atan2(-v_par).rem_euclid(2.0 * PI);
                for k in [-3.0, -1.0, 0.0, 1.0, 3.0] {
                    push_break(&mut breaks, a_star + k * ang, lo, hi);
                }
            }
            let f = |a: f64| {
                let (s, c) = a.sin_cos();
                let chi = cut.eval(rho(c));
                if chi == 0.0 {
                    return 0.0;
                }
                let dx = v[0] + t * (c * frame.axis[0] + s * perp[0]);
                let dy = v[1] + t * (c * frame.axis[1] + s * perp[1]);
                chi * (-(dx * dx + dy * dy) / w2).exp()
            };
            b.amplitude * integrate_panels(f, breaks, tol) / (2.0 * PI)
        }
    }
}

/// `K` with `mean_{|y-x|=t} φ(|y|) Y(ŷ) = K(|x|, t) Y(x̂)` for a single-channel term.
pub(crate) fn harmonic_kernel(n: usize, h: &HarmonicTerm, cut: SmoothCutoff, r: f64, t: f64) -> f64 {
    radial_kernel(n, h.m, r, t, cut.outer, Some(cut.inner), &|s| cut.eval(s) * h.radial(s), 1e-15 * h.amplitude.abs())
}

/// `K_m(r, t)` for a radial profile `phi` supported in `[0, r1]`: the factor
/// by which the spherical mean operator scales `phi(|y|) Y_l^m(ŷ)`.
pub(crate) fn radial_kernel(
    n: usize,
    m: usize,
    r: f64,
    t: f64,
    r1: f64,
    r0: Option<f64>,
    phi: &dyn Fn(f64) -> f64,
    abs_tol: f64,
) -> f64 {
    if t == 0.0 {
        return phi(r);
    }
    let u_top = u_threshold(r, t, r1).min(1.0);
    if u_top <= -1.0 {
        return 0.0;
    }
    let rho = |u: f64| (r * r + t * t + 2.0 * r * t * u).max(0.0).sqrt();
    let tol = abs_tol.max(1e-300);
    match n {
        3 => {
            let mut breaks = vec![-1.0, u_top];
            if let Some(r0) = r0 {
                push_break(&mut breaks, u_threshold(r, t, r0), -1.0, u_top);
            }
            let f = |u: f64| {
                let s = rho(u);
                if s == 0.0 {
                    return if m == 0 { phi(0.0) } else { 0.0 };
                }
                phi(s) * legendre_p(m, ((r + t * u) / s).clamp(-1.0, 1.0))
            };
            0.5 * integrate_panels(f, breaks, tol)
        }
        _ => {
            let a_top = u_top.max(-1.0).acos();
            let mut breaks = vec![a_top, PI];
            if let Some(r0) = r0 {
                let ul = u_threshold(r, t, r0);
                if ul > -1.0 && ul < 1.0 {
                    push_break(&mut breaks, ul.acos(), a_top, PI);
                }
            }
            let f = |a: f64| {
                let c = a.cos();
                let s = rho(c);
                if s == 0.0 {
                    return if m == 0 { phi(0.0) } else { 0.0 };
                }
                let cb = ((r + t * c) / s).clamp(-1.0, 1.0);
                phi(s) * chebyshev_t(m, cb)
            };
            integrate_panels(f, breaks, tol) / PI
        }
    }
}

fn chebyshev_t(m: usize, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let (mut a, mut b) = (1.0, x);
    for _ in 1..m {
        let c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    b
}

/// Spherical mean of an arbitrary function by the product rule `rule`
/// (directions on the unit circle or sphere with weights summing to ω).
pub fn spherical_mean_product<F: Fn(&[f64]) -> f64>(f: F, center: &[f64], t: f64, rule: &CenterGrid) -> f64 {
    let n = rule.n;
    let mut y = [0.0; 3];
    let mut s = 0.0;
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        for i in 0..n {
            y[i] = center[i] + t * p[i];
        }
        s += w * f(&y[..n]);
    }
    s / rule.total_weight()
}

/// Tabulates `g(x_i, t_j) = spherical_mean(ph, x_i, t_j)`.
pub fn forward_transform(ph: &Phantom, centers: &CenterGrid, t_grid: UniformGrid) -> Result<BoundaryData> {
    if centers.n != ph.n {
        return Err(Error::Dimension(centers.n));
    }
    let nt = t_grid.len;
    let rows: Vec<Vec<f64>> = centers
        .points
        .par_iter()
        .map(|p| (0..nt).map(|j| spherical_mean(ph, &p[..ph.n], t_grid.value(j))).collect())
        .collect();
    let mut out = BoundaryData::zeros(centers.clone(), t_grid);
    for (i, row) in rows.into_iter().enumerate() {
        out.row_mut(i).copy_from_slice(&row);
    }
    Ok(out)
}

/// Angular resolution used by the zonal (Funk-Hecke) reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZonalOptions {
    /// Trapezoid points on `[0, π]` (2D) or Gauss-Legendre nodes in the angle (3D).
    pub n_angle: usize,
}

impl Default for ZonalOptions {
    fn default() -> Self {
        ZonalOptions { n_angle: 192 }
    }
}

/// Harmonic coefficients `G_{l,m}(r, t_j)` of the spherical means over the
/// sphere of centers of radius `r`, one profile per channel.
///
/// Each bump's mean depends only on the angle γ between the center and the
/// bump direction, so its projection reduces to a one-dimensional integral in
/// γ against `cos mγ` (2D) or `P_m(cos γ)` (3D).
pub fn harmonic_forward(ph: &Phantom, r: f64, t_grid: UniformGrid, m_max: usize, opts: ZonalOptions) -> Result<Vec<Vec<f64>>> {
    let n = ph.n;
    let basis = HarmonicBasis::new(n, m_max)?;
    let nt = t_grid.len;
    let mut out = vec![vec![0.0; nt]; basis.len()];
    let rule: Rule = match n {
        2 => {
            let k = opts.n_angle.max(8);
            let h = PI / k as f64;
            let mut w = vec![h; k + 1];
            w[0] *= 0.5;
            w[k] *= 0.5;
            Rule { nodes: (0..=k).map(|i| i as f64 * h).collect(), weights: w }
        }
        _ => gauss_legendre(opts.n_angle.max(8)).mapped(0.0, PI),
    };
    // Zonal kernel values of each degree at each angle node, times the weight.
    let zonal: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&g, &w)| {
            (0..=m_max)
                .map(|m| match n {
                    2 => 2.0 * w * (m as f64 * g).cos(),
                    _ => 2.0 * PI * w * g.sin() * legendre_p(m, g.cos()),
                })
                .collect()
        })
        .collect();
    let mut y = vec![0.0; basis.len()];
    for b in &ph.bumps {
        let c = norm(&b.center[..n]);
        let axis: Vec<f64> = if c > 0.0 { b.center[..n].iter().map(|v| v / c).collect() } else { unit_axis(n) };
        basis.eval_into(&axis, &mut y);
        let perp = perpendicular(n, &axis);
        let m_top = if c > 0.0 { m_max } else { 0 };
        let profiles: Vec<Vec<f64>> = (0..nt)
            .into_par_iter()
            .map(|j| {
                let t = t_grid.value(j);
                let mut acc = vec![0.0; m_top + 1];
                if c == 0.0 || r == 0.0 {
                    let x: Vec<f64> = axis.iter().map(|a| r * a).collect();
                    let hv = bump_mean(n, b, ph.cutoff(), &x, t);
                    // Constant in γ: only the degree-0 projection survives.
                    acc[0] = hv * zonal.iter().map(|z| z[0]).sum::<f64>();
                    return acc;
                }
                for (gi, &g) in rule.nodes.iter().enumerate() {
                    let (s, co) = g.sin_cos();
                    let x: Vec<f64> = (0..n).map(|i| r * (co * axis[i] + s * perp[i])).collect();
                    let hv = bump_mean(n, b, ph.cutoff(), &x, t);
                    if hv == 0.0 {
                        continue;
                    }
                    for (a, z) in acc.iter_mut().zip(&zonal[gi]) {
                        *a += hv * z;
                    }
                }
                acc
            })
            .collect();
        for (k, &(m, _)) in basis.channels().iter().enumerate() {
            if m > m_top {
                continue;
            }
            for j in 0..nt {
                out[k][j] += y[k] * profiles[j][m];
            }
        }
    }
    for h in &ph.harmonics {
        if h.m > m_max {
            continue;
        }
        let k = basis.index_of(h.m, h.l);
        let vals: Vec<f64> = (0..nt)
            .into_par_iter()
            .map(|j| harmonic_kernel(n, h, ph.cutoff(), r, t_grid.value(j)))
            .collect();
        for (o, v) in out[k].iter_mut().zip(vals) {
            *o += v;
        }
    }
    Ok(out)
}

fn unit_axis(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    e
}

fn perpendicular(n: usize, a: &[f64]) -> Vec<f64> {
    if n == 2 {
        return vec![-a[1], a[0]];
    }
    // Any unit vector orthogonal to a.
    let helper = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = dot(&helper, a);
    let mut p: Vec<f64> = (0..3).map(|i| helper[i] - d * a[i]).collect();
    let pn = norm(&p);
    p.iter_mut().for_each(|v| *v /= pn);
    p
}

/// Boundary spectrum `g_{l,m}(t)` of a phantom at `r = 1` via the zonal reduction.
pub fn phantom_spectrum(ph: &Phantom, t_grid: UniformGrid, m_max: usize, opts: ZonalOptions) -> Result<HarmonicSpectrum> {
    let channels = harmonic_forward(ph, 1.0, t_grid, m_max, opts)?;
    HarmonicSpectrum::new(ph.n, m_max, t_grid, channels)
}

/// Boundary spectrum of a [`PolarField`]: each channel `f_{l,m}(s) Y_l^m`
/// is mapped to `K_m[f_{l,m}](1, t) Y_l^m` on the unit sphere.
pub fn field_spectrum(field: &PolarField, t_grid: UniformGrid) -> Result<HarmonicSpectrum> {
    let n = field.n;
    let basis = field.basis();
    let rg = field.r_grid;
    let nt = t_grid.len;
    let channels: Vec<Vec<f64>> = basis
        .channels()
        .par_iter()
        .enumerate()
        .map(|(k, &(m, _))| {
            let c = &field.coeffs[k];
            if c.iter().all(|&v| v == 0.0) {
                return vec![0.0; nt];
            }
            let phi = |s: f64| if s > rg.end { 0.0 } else { rg.interpolate(c, s) };
            (0..nt).map(|j| field_kernel(n, m, t_grid.value(j), rg, &phi)).collect()
        })
        .collect();
    HarmonicSpectrum::new(n, field.m_max, t_grid, channels)
}

/// `K_m(1, t)` for a piecewise-linear radial profile, integrated cell by cell.
fn field_kernel(n: usize, m: usize, t: f64, rg: UniformGrid, phi: &dyn Fn(f64) -> f64) -> f64 {
    if t == 0.0 {
        return phi(1.0);
    }
    let lo = (1.0 - t).abs();
    let hi = (1.0 + t).min(rg.end);
    if lo >= hi {
        return 0.0;
    }
    let gl = gauss_legendre(6);
    let h = rg.step();
    // Cell boundaries of the radial grid inside [lo, hi].
    let mut cuts = vec![lo, hi];
    let first = (lo / h).ceil() as usize;
    let last = (hi / h).floor() as usize;
    for i in first..=last {
        push_break(&mut cuts, i as f64 * h, lo, hi);
    }
    cuts.sort_by(f64::total_cmp);
    match n {
        3 => {
            // u = (s² − 1 − t²)/(2t), du = s ds / t, and (1 + tu)/s = (1 + s² − t²)/(2s).
            let mut acc = 0.0;
            for w in cuts.windows(2) {
                let rule = gl.mapped(w[0], w[1]);
                acc += rule.integrate(|s| {
                    let arg = ((1.0 + s * s - t * t) / (2.0 * s)).clamp(-1.0, 1.0);
                    phi(s) * legendre_p(m, arg) * s
                });
            }
            0.5 * acc / t
        }
        _ => {
            // α ∈ [α_top, π] with s(α) = √(1 + t² + 2t cos α); composite Gauss-Legendre in α.
            let u_top = ((hi * hi - 1.0 - t * t) / (2.0 * t)).clamp(-1.0, 1.0);
            let a0 = u_top.acos();
            let panels = 128;
            let mut acc = 0.0;
            let da = (PI - a0) / panels as f64;
            for p in 0..panels {
                let rule = gl.mapped(a0 + p as f64 * da, a0 + (p + 1) as f64 * da);
                acc += rule.integrate(|a| {
                    let c = a.cos();
                    let s = (1.0 + t * t + 2.0 * t * c).max(0.0).sqrt();
                    if s == 0.0 {
                        return if m == 0 { phi(0.0) } else { 0.0 };
                    }
                    phi(s) * chebyshev_t(m, ((1.0 + t * c) / s).clamp(-1.0, 1.0))
                });
            }
            acc / PI
        }
    }
}

/// Harmonic representation of `G(x, t)` on a polar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxField {
    pub n: usize,
    pub m_max: usize,
    pub r_grid: UniformGrid,
    pub t_grid: UniformGrid,
    /// Per channel, row-major `G_{l,m}(r_i, t_j)` with `t` fastest.
    pub channels: Vec<Vec<f64>>,
}

impl DarbouxField {
    /// Field with `G_{l,m}(r, t) = f(m, l, r, t)`.
    pub fn from_fn<F: Fn(usize, usize, f64, f64) -> f64>(
        n: usize,
        m_max: usize,
        r_grid: UniformGrid,
        t_grid: UniformGrid,
        f: F,
    ) -> Result<Self> {
        let basis = HarmonicBasis::new(n, m_max)?;
        let channels = basis
            .channels()
            .iter()
            .map(|&(m, l)| {
                let mut v = Vec::with_capacity(r_grid.len * t_grid.len);
                for i in 0..r_grid.len {
                    for j in 0..t_grid.len {
                        v.push(f(m, l, r_grid.value(i), t_grid.value(j)));
                    }
                }
                v
            })
            .collect();
        Ok(DarbouxField { n, m_max, r_grid, t_grid, channels })
    }

    pub fn basis(&self) -> HarmonicBasis {
        HarmonicBasis::new(self.n, self.m_max).expect("validated dimension")
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.channels[k][i * self.t_grid.len + j]
    }
}

/// Interior means `G_{l,m}(r_i, t_j)` of the phantom.
pub fn interior_means(ph: &Phantom, r_grid: UniformGrid, t_grid: UniformGrid, m_max: usize) -> Result<DarbouxField> {
    interior_means_with(ph, r_grid, t_grid, m_max, ZonalOptions::default())
}

pub fn interior_means_with(
    ph: &Phantom,
    r_grid: UniformGrid,
    t_grid: UniformGrid,
    m_max: usize,
    opts: ZonalOptions,
) -> Result<DarbouxField> {
    let basis = HarmonicBasis::new(ph.n, m_max)?;
    let nt = t_grid.len;
    let mut channels = vec![vec![0.0; r_grid.len * nt]; basis.len()];
    for i in 0..r_grid.len {
        let prof = harmonic_forward(ph, r_grid.value(i), t_grid, m_max, opts)?;
        for (k, p) in prof.into_iter().enumerate() {
            channels[k][i * nt..(i + 1) * nt].copy_from_slice(&p);
        }
    }
    Ok(DarbouxField { n: ph.n, m_max, r_grid, t_grid, channels })
}

/// Rectangle of `(r, t)` nodes over which the Darboux residual is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualWindow {
    pub r_min: f64,
    pub r_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

/// Max-norm residual of `Ψ_tt + ((n−1)/t)Ψ_t − Ψ_rr − ((n−1+2m)/r)Ψ_r` with
/// `Ψ = G_{l,m}/r^m`, over all channels of degree `m`, on interior nodes with
/// `t ≥ 2h_t` and `r ≥ 2h_r` (and `r ≥ 0.1` for `m > 0`, where dividing by
/// `r^m` would amplify round-off).
pub fn darboux_residual(field: &DarbouxField, m: usize) -> Result<f64> {
    let hr = field.r_grid.step();
    let ht = field.t_grid.step();
    let window = ResidualWindow {
        r_min: if m > 0 { (2.0 * hr).max(0.1) } else { 2.0 * hr },
        r_max: field.r_grid.end,
        t_min: 2.0 * ht,
        t_max: field.t_grid.end,
    };
    darboux_residual_in(field, m, window)
}

/// [`darboux_residual`] restricted to a fixed physical window.
pub fn darboux_residual_in(field: &DarbouxField, m: usize, window: ResidualWindow) -> Result<f64> {
    let (nr, nt) = (field.r_grid.len, field.t_grid.len);
    if nr < 8 || nt < 8 {
        return Err(Error::GridTooCoarse(format!("Darboux residual needs ≥ 8 points per axis, got {nr}×{nt}")));
    }
    if m > field.m_max {
        return Ok(0.0);
    }
    let hr = field.r_grid.step();
    let ht = field.t_grid.step();
    let basis = field.basis();
    let n1 = (field.n - 1) as f64;
    let nm = n1 + 2.0 * m as f64;
    let eps = 1e-9;
    let mut worst: f64 = 0.0;
    for l in 1..=harmonic_count(field.n, m) {
        let k = basis.index_of(m, l);
        let psi = |i: usize, j: usize| field.get(k, i, j) / field.r_grid.value(i).powi(m as i32);
        for i in 1..nr - 1 {
            let r = field.r_grid.value(i);
            if r < window.r_min - eps * hr || r > window.r_max + eps * hr || r < 2.0 * hr - eps * hr {
                continue;
            }
            for j in 1..nt - 1 {
                let t = field.t_grid.value(j);
                if t < window.t_min - eps * ht || t > window.t_max + eps * ht || t < 2.0 * ht - eps * ht {
                    continue;
                }
                let c = psi(i, j);
                let tt = (psi(i, j + 1) - 2.0 * c + psi(i, j - 1)) / (ht * ht);
                let t1 = (psi(i, j + 1) - psi(i, j - 1)) / (2.0 * ht);
                let rr = (psi(i + 1, j) - 2.0 * c + psi(i - 1, j)) / (hr * hr);
                let r1 = (psi(i + 1, j) - psi(i - 1, j)) / (2.0 * hr);
                let res = tt + n1 / t * t1 - rr - nm / r * r1;
                worst = worst.max(res.abs());
            }
        }
    }
    Ok(worst)
}
