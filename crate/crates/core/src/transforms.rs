//! One-dimensional intertwining operators on sampled time profiles:
//! Fourier-Bessel, Weyl and Poisson transforms and their inverses.

use std::f64::consts::PI;

use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::specfun::quadrature::{gauss_gegenbauer, gauss_legendre, simpson_weights};
use crate::specfun::{normalized_j, Order};

/// Samples of an even function of `t` on a uniform grid of `[0, T]`,
/// declared to vanish beyond `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile {
    pub t_grid: UniformGrid,
    pub values: Vec<f64>,
    pub support: f64,
}

impl TimeProfile {
    pub fn new(t_grid: UniformGrid, values: Vec<f64>, support: f64) -> Result<Self> {
        if values.len() != t_grid.len {
            return Err(Error::InvalidArgument(format!(
                "profile has {} values for {} grid points",
                values.len(),
                t_grid.len
            )));
        }
        if !(support > 0.0) || support > t_grid.end + 1e-12 {
            return Err(Error::InvalidArgument(format!("support bound {support} outside (0, T]")));
        }
        Ok(TimeProfile { t_grid, values, support })
    }

    /// Profile of `f` sampled on the grid.
    pub fn from_fn<F: Fn(f64) -> f64>(t_grid: UniformGrid, support: f64, f: F) -> Result<Self> {
        Self::new(t_grid, t_grid.values().into_iter().map(f).collect(), support)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Six-point Lagrange interpolation of the even extension; zero beyond `T`.
    pub fn interpolate(&self, s: f64) -> f64 {
        interpolate_even(&self.t_grid, &self.values, s)
    }
}

/// Transform values on a uniform frequency grid `[0, Λ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    pub lambda_grid: UniformGrid,
    pub values: Vec<f64>,
    pub p: Order,
}

impl SpectralProfile {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Default spectral cutoff `Λ = 1.5 π N_t / T`.
pub fn default_lambda_max(t_grid: &UniformGrid) -> f64 {
    1.5 * PI * t_grid.len as f64 / t_grid.end
}

pub(crate) fn interpolate_even(grid: &UniformGrid, y: &[f64], s: f64) -> f64 {
    let s = s.abs();
    let n = grid.len;
    let h = grid.step();
    let x = (s - grid.start) / h;
    if x > (n - 1) as f64 + 1e-9 {
        return 0.0;
    }
    let i = x.floor() as i64;
    if (x - i as f64).abs() < 1e-14 && (i as usize) < n {
        return y[i as usize];
    }
    // Stencil i-2..=i+3, reflected at 0 and shifted left at the far end.
    let mut lo = i - 2;
    if lo + 5 > (n - 1) as i64 {
        lo = (n - 1) as i64 - 5;
    }
    let mut acc = 0.0;
    for a in 0..6 {
        let ja = lo + a;
        let mut w = 1.0;
        for b in 0..6 {
            if a != b {
                let jb = lo + b;
                w *= (x - jb as f64) / (ja - jb) as f64;
            }
        }
        let idx = ja.unsigned_abs() as usize;
        acc += w * y[idx.min(n - 1)];
    }
    acc
}

/// `F_p(g)(λ) = ∫_0^∞ g(t) j_p(λt) t^{2p+1} dt` by composite Simpson on the t grid.
pub fn fourier_bessel(g: &TimeProfile, p: Order, lambda_grid: &[f64]) -> Result<Vec<f64>> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidArgument("empty λ grid".into()));
    }
    let w = simpson_weights(g.t_grid.len, g.t_grid.step());
    let e = 2.0 * p.value() + 1.0;
    let weighted: Vec<(f64, f64)> = (0..g.t_grid.len)
        .filter(|&j| g.values[j] != 0.0)
        .map(|j| {
            let t = g.t_grid.value(j);
            (t, w[j] * g.values[j] * t.powf(e))
        })
        .collect();
    Ok(lambda_grid
        .iter()
        .map(|&lam| weighted.iter().map(|&(t, c)| c * normalized_j(p, lam * t)).sum())
        .collect())
}

/// [`fourier_bessel`] on a uniform grid, returned as a [`SpectralProfile`].
pub fn fourier_bessel_profile(g: &TimeProfile, p: Order, lambda_grid: UniformGrid) -> Result<SpectralProfile> {
    let values = fourier_bessel(g, p, &lambda_grid.values())?;
    Ok(SpectralProfile { lambda_grid, values, p })
}

/// Result of [`inverse_fourier_bessel`] with the truncation diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseFourierBessel {
    pub profile: TimeProfile,
    /// `|Φ(Λ)| / max|Φ|` when it exceeds `1e-8`.
    pub truncation_warning: Option<f64>,
}

/// `g(t) = (2^{2p} Γ(p+1)²)^{-1} ∫_0^Λ Φ(λ) j_p(λt) λ^{2p+1} dλ` by Simpson in λ.
pub fn inverse_fourier_bessel(phi: &SpectralProfile, t_grid: UniformGrid) -> Result<InverseFourierBessel> {
    let p = phi.p;
    let pv = p.value();
    let lg = phi.lambda_grid;
    let w = simpson_weights(lg.len, lg.step());
    let scale = phi.max_abs();
    let tail = phi.values.last().copied().unwrap_or(0.0).abs();
    let truncation_warning = if scale > 0.0 && tail > 1e-8 * scale { Some(tail / scale) } else { None };
    let k = (-(2.0 * pv * std::f64::consts::LN_2 + 2.0 * ln_gamma(pv + 1.0))).exp();
    let weighted: Vec<(f64, f64)> = (0..lg.len)
        .filter(|&i| phi.values[i] != 0.0)
        .map(|i| {
            let lam = lg.value(i);
            (lam, w[i] * phi.values[i] * lam.powf(2.0 * pv + 1.0))
        })
        .collect();
    let values = t_grid
        .values()
        .iter()
        .map(|&t| k * weighted.iter().map(|&(lam, c)| c * normalized_j(p, lam * t)).sum::<f64>())
        .collect();
    Ok(InverseFourierBessel { profile: TimeProfile::new(t_grid, values, t_grid.end)?, truncation_warning })
}

/// Fourier cosine transform `∫_0^T h(t) cos(λt) dt` by Simpson.
pub fn cosine_transform(h: &TimeProfile, lambda: &[f64]) -> Vec<f64> {
    let w = simpson_weights(h.t_grid.len, h.t_grid.step());
    let t = h.t_grid.values();
    lambda
        .iter()
        .map(|&lam| (0..t.len()).map(|j| w[j] * h.values[j] * (lam * t[j]).cos()).sum())
        .collect()
}

/// Gauss-Legendre order used by the Abel-type integrals.
const ABEL_NODES: usize = 96;

/// `W_p g(t) = c_p ∫_t^∞ g(s)(s² − t²)^{p−1/2} s ds`, `c_p = 2Γ(p+1)/(√π Γ(p+1/2))`.
///
/// With `s² = t² + u²` the integrand becomes `g(√(t²+u²)) u^{2p}`; for
/// `p < 0` the further substitution `v = u^{2p+1}` removes the remaining
/// endpoint singularity. `W_{−1/2}` is the identity.
pub fn weyl(g: &TimeProfile, p: Order) -> Result<TimeProfile> {
    let pv = p.value();
    if pv == -0.5 {
        return Ok(g.clone());
    }
    let cp = 2.0 * gamma(pv + 1.0) / (PI.sqrt() * gamma(pv + 0.5));
    let a = g.support;
    let gl = gauss_legendre(ABEL_NODES);
    let values = g
        .t_grid
        .values()
        .iter()
        .map(|&t| {
            if t >= a {
                return 0.0;
            }
            let umax = (a * a - t * t).sqrt();
            let integral = if pv >= 0.0 {
                gl.mapped(0.0, umax).integrate(|u| g.interpolate((t * t + u * u).sqrt()) * u.powf(2.0 * pv))
            } else {
                let e = 2.0 * pv + 1.0;
                gl.mapped(0.0, umax.powf(e))
                    .integrate(|v| g.interpolate((t * t + v.powf(2.0 / e)).sqrt()))
                    / e
            };
            cp * integral
        })
        .collect();
    TimeProfile::new(g.t_grid, values, g.support)
}

/// Points in the Lagrange stencil of [`d_dtau`].
const TAU_STENCIL: usize = 5;

/// Derivative of samples with respect to `τ = t²`, using five-point
/// Lagrange formulas on the nonuniform τ nodes (centered where possible).
fn d_dtau(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let tau: Vec<f64> = t.iter().map(|v| v * v).collect();
    let s = TAU_STENCIL.min(n);
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(s / 2).min(n - s);
            let x = tau[i];
            let mut acc = 0.0;
            for a in lo..lo + s {
                // l_a'(x) = Σ_{b≠a} 1/(x_a−x_b) Π_{c≠a,b} (x−x_c)/(x_a−x_c).
                let mut d = 0.0;
                for b in lo..lo + s {
                    if b == a {
                        continue;
                    }
                    let mut prod = 1.0 / (tau[a] - tau[b]);
                    for c in lo..lo + s {
                        if c != a && c != b {
                            prod *= (x - tau[c]) / (tau[a] - tau[c]);
                        }
                    }
                    d += prod;
                }
                acc += d * y[a];
            }
            acc
        })
        .collect()
}

/// Inverse Weyl transform for `p = (n−2)/2`.
///
/// `n = 3`: `g = −2 dU/d(t²)`. `n = 2`: `g(t) = −2 ∫_0^{√(a²−t²)} D(√(t²+u²)) du`
/// with `D = dU/d(s²)`, the Abel inversion after the substitution `s² = t² + u²`.
pub fn inverse_weyl(u: &TimeProfile, n: usize) -> Result<TimeProfile> {
    if u.t_grid.len < 8 {
        return Err(Error::GridTooCoarse(format!("inverse Weyl needs ≥ 8 samples, got {}", u.t_grid.len)));
    }
    let t = u.t_grid.values();
    let d = d_dtau(&t, &u.values);
    let values = match n {
        3 => d.iter().map(|v| -2.0 * v).collect(),
        2 => {
            let dp = TimeProfile::new(u.t_grid, d, u.support)?;
            let gl = gauss_legendre(ABEL_NODES);
            let a = u.support;
            t.iter()
                .map(|&tt| {
                    if tt >= a {
                        return 0.0;
                    }
                    let umax = (a * a - tt * tt).sqrt();
                    -2.0 * gl.mapped(0.0, umax).integrate(|s| dp.interpolate((tt * tt + s * s).sqrt()))
                })
                .collect()
        }
        _ => return Err(Error::Dimension(n)),
    };
    TimeProfile::new(u.t_grid, values, u.support)
}

/// `P_p U(t) = c_p ∫_{−1}^{1} U(μt)(1−μ²)^{p−1/2} dμ`, `c_p = Γ(p+1)/(√π Γ(p+1/2))`,
/// by Gauss-Gegenbauer quadrature. `P_{−1/2}` is the identity.
pub fn poisson(u: &TimeProfile, p: Order) -> Result<TimeProfile> {
    poisson_with_nodes(u, p, 64)
}

pub fn poisson_with_nodes(u: &TimeProfile, p: Order, nodes: usize) -> Result<TimeProfile> {
    let pv = p.value();
    if pv == -0.5 {
        return Ok(u.clone());
    }
    let rule = gauss_gegenbauer(nodes, pv);
    let cp = (ln_gamma(pv + 1.0) - 0.5 * PI.ln() - ln_gamma(pv + 0.5)).exp();
    let values = u
        .t_grid
        .values()
        .iter()
        .map(|&t| cp * rule.integrate(|mu| u.interpolate(mu * t)))
        .collect();
    TimeProfile::new(u.t_grid, values, u.t_grid.end)
}

/// Inverse Poisson transform for half-odd-integer `p`:
/// `U = t (d/dτ)^k (t^{2p} G) / (c_p (k−1)!)`, `τ = t²`, `k = p + 1/2`.
///
/// Expanded by Leibniz into `Σ_j C(k,j) Γ(k+1/2)/Γ(j+1/2) τ^j G^{(j)}(τ)`,
/// which only differentiates the smooth function `G(√τ)`.
pub fn inverse_poisson(g: &TimeProfile, p: Order) -> Result<TimeProfile> {
    let pv = p.value();
    let k2 = 2.0 * pv;
    if (k2 - k2.round()).abs() > 1e-12 || (k2.round() as i64) % 2 == 0 || pv < 0.0 {
        return Err(Error::UnsupportedOrder(pv));
    }
    let k = (pv + 0.5).round() as usize;
    if g.t_grid.len < 4 * k + 4 {
        return Err(Error::GridTooCoarse(format!("inverse Poisson needs more than {} samples", 4 * k + 4)));
    }
    let cp = gamma(pv + 1.0) / (PI.sqrt() * gamma(pv + 0.5));
    let kf_fact: f64 = (1..k).map(|i| i as f64).product();
    let t = g.t_grid.values();
    let mut deriv = g.values.clone();
    let mut acc = vec![0.0; t.len()];
    for j in 0..=k {
        if j > 0 {
            deriv = d_dtau(&t, &deriv);
        }
        let binom = binomial(k, j);
        let coef = binom * gamma(k as f64 + 0.5) / gamma(j as f64 + 0.5);
        for i in 0..t.len() {
            acc[i] += coef * (t[i] * t[i]).powi(j as i32) * deriv[i];
        }
    }
    let values = acc.into_iter().map(|v| v / (cp * kf_fact)).collect();
    TimeProfile::new(g.t_grid, values, g.support)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Centered second derivative and Bessel operator `B_p = d²/dt² + ((2p+1)/t) d/dt`
/// at nodes `0..N−1` (the last node is left at zero).
pub fn bessel_operator(u: &TimeProfile, p: Order) -> Vec<f64> {
    let h = u.t_grid.step();
    let y = &u.values;
    let n = y.len();
    let mut out = vec![0.0; n];
    // Even extension at the axis: B_p U(0) = (2p+2) U''(0).
    out[0] = (2.0 * p.value() + 2.0) * 2.0 * (y[1] - y[0]) / (h * h);
    for i in 1..n - 1 {
        let t = u.t_grid.value(i);
        let d2 = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
        let d1 = (y[i + 1] - y[i - 1]) / (2.0 * h);
        out[i] = d2 + (2.0 * p.value() + 1.0) / t * d1;
    }
    out
}

/// Centered second difference, using the even extension at `t = 0`.
pub fn second_difference(u: &TimeProfile) -> Vec<f64> {
    let h = u.t_grid.step();
    let y = &u.values;
    let mut out = vec![0.0; y.len()];
    out[0] = 2.0 * (y[1] - y[0]) / (h * h);
    for i in 1..y.len() - 1 {
        out[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
    }
    out
}

/// Max residuals of the intertwining identities `P_p(U'') = B_p(P_p U)` and
/// `(W_p G)'' = W_p(B_p G)` over nodes with `t ∈ [t_min, t_max]`.
pub fn intertwining_residuals(u: &TimeProfile, g: &TimeProfile, p: Order, t_min: f64, t_max: f64) -> Result<(f64, f64)> {
    let window = |tg: &UniformGrid, i: usize| {
        let t = tg.value(i);
        t >= t_min - 1e-12 && t <= t_max + 1e-12
    };
    let u2 = TimeProfile::new(u.t_grid, second_difference(u), u.support)?;
    let lhs = poisson(&u2, p)?;
    let rhs = bessel_operator(&poisson(u, p)?, p);
    let r1 = (1..u.t_grid.len - 1)
        .filter(|&i| window(&u.t_grid, i))
        .map(|i| (lhs.values[i] - rhs[i]).abs())
        .fold(0.0, f64::max);
    let wg = weyl(g, p)?;
    let lhs2 = second_difference(&wg);
    let bg = TimeProfile::new(g.t_grid, bessel_operator(g, p), g.support)?;
    let rhs2 = weyl(&bg, p)?;
    let r2 = (1..g.t_grid.len - 1)
        .filter(|&i| window(&g.t_grid, i))
        .map(|i| (lhs2[i] - rhs2.values[i]).abs())
        .fold(0.0, f64::max);
    Ok((r1, r2))
}

/// `max_λ λ^N |Φ(λ)|` over the grid, a finite-range decay diagnostic.
pub fn decay_diagnostic(phi: &SpectralProfile, power: i32) -> f64 {
    (0..phi.lambda_grid.len)
        .map(|i| phi.lambda_grid.value(i).powi(power) * phi.values[i].abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> UniformGrid {
        UniformGrid::new(0.0, 2.0, n).unwrap()
    }

    fn cutoff(t: f64, a: f64) -> f64 {
        crate::phantom::SmoothCutoff { inner: 0.6 * a, outer: a }.eval(t)
    }

    fn gaussian(t_grid: UniformGrid, w: f64) -> TimeProfile {
        TimeProfile::from_fn(t_grid, 1.5, |t| (-(t * t) / (w * w)).exp() * cutoff(t, 1.5)).unwrap()
    }

    #[test]
    fn zero_profiles_map_to_zero() {
        let z = TimeProfile::new(grid(65), vec![0.0; 65], 2.0).unwrap();
        let p = Order::new(0.5).unwrap();
        assert!(fourier_bessel(&z, p, &[0.0, 1.0, 5.0]).unwrap().iter().all(|&v| v == 0.0));
        assert!(weyl(&z, p).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(inverse_weyl(&z, 3).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(inverse_weyl(&z, 2).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(poisson(&z, p).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(inverse_poisson(&z, Order::new(1.5).unwrap()).unwrap().values.iter().all(|&v| v == 0.0));
        let phi = SpectralProfile { lambda_grid: UniformGrid::new(0.0, 10.0, 11).unwrap(), values: vec![0.0; 11], p };
        assert!(inverse_fourier_bessel(&phi, grid(9)).unwrap().profile.values.iter().all(|&v| v == 0.0));
        assert!(fourier_bessel(&z, p, &[]).is_err());
    }

    /// 3D radial Fourier transform `∫_{R³} g(|x|) e^{-iξ·x} dx` at `|ξ| = λ`
    /// by a brute-force Cartesian sum, against `4π F_{1/2}(g)(λ)`.
    #[test]
    fn half_order_transform_is_radial_fourier_transform() {
        let g = gaussian(grid(401), 0.3);
        let p = Order::new(0.5).unwrap();
        let lams = [0.0, 2.0, 5.0];
        let fb = fourier_bessel(&g, p, &lams).unwrap();
        let m = 60;
        let h = 1.6 / m as f64;
        for (k, &lam) in lams.iter().enumerate() {
            let mut s = 0.0;
            for i in -m..=m {
                for j in -m..=m {
                    for l in -m..=m {
                        let (x, y, z) = (i as f64 * h, j as f64 * h, l as f64 * h);
                        let r = (x * x + y * y + z * z).sqrt();
                        if r < 1.5 {
                            s += g.interpolate(r) * (lam * z).cos();
                        }
                    }
                }
            }
            s *= h * h * h;
            assert!((s - 4.0 * PI * fb[k]).abs() < 1e-6 * s.abs().max(1e-3), "λ={lam}: {s} vs {}", 4.0 * PI * fb[k]);
        }
    }

    #[test]
    fn spectrum_of_windowed_bessel_peaks_at_its_frequency() {
        let p = Order::new(0.0).unwrap();
        let lam0 = 30.0;
        let g = TimeProfile::from_fn(grid(1025), 2.0, |t| normalized_j(p, lam0 * t) * cutoff(t, 1.9)).unwrap();
        let lg = UniformGrid::new(0.0, 60.0, 601).unwrap();
        let f = fourier_bessel_profile(&g, p, lg).unwrap();
        let (imax, _) = f.values.iter().enumerate().skip(10).max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap();
        assert!((lg.value(imax) - lam0).abs() <= lg.step() + 1e-9);
    }

    #[test]
    fn fourier_bessel_round_trip() {
        for &pv in &[0.0, 0.5] {
            let p = Order::new(pv).unwrap();
            let tg = grid(2049);
            let g = TimeProfile::from_fn(tg, 2.0, |t| (-(t * t) / 0.04).exp()).unwrap();
            let lg = UniformGrid::new(0.0, 50.0, 2001).unwrap();
            let phi = fourier_bessel_profile(&g, p, lg).unwrap();
            let back = inverse_fourier_bessel(&phi, tg).unwrap();
            assert!(back.truncation_warning.is_none(), "{:?}", back.truncation_warning);
            let err = back.profile.values.iter().zip(&g.values).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let nrm = g.values.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(err / nrm < 1e-6, "p={pv}: {}", err / nrm);
        }
    }

    #[test]
    fn truncation_warning_is_reported() {
        let p = Order::new(0.0).unwrap();
        let g = gaussian(grid(257), 0.05);
        let lg = UniformGrid::new(0.0, 10.0, 101).unwrap();
        let phi = fourier_bessel_profile(&g, p, lg).unwrap();
        assert!(inverse_fourier_bessel(&phi, grid(33)).unwrap().truncation_warning.is_some());
    }

    #[test]
    fn narrow_spectrum_inverts_to_bessel() {
        let p = Order::new(0.5).unwrap();
        let lam0 = 12.0;
        let lg = UniformGrid::new(0.0, 24.0, 4801).unwrap();
        let sig = 0.05;
        let values: Vec<f64> = lg.values().iter().map(|&l| (-((l - lam0) / sig).powi(2)).exp()).collect();
        let phi = SpectralProfile { lambda_grid: lg, values, p };
        let g = inverse_fourier_bessel(&phi, grid(101)).unwrap().profile;
        let c = g.values[0];
        for (i, v) in g.values.iter().enumerate().take(20) {
            let t = grid(101).value(i);
            assert!((v - c * normalized_j(p, lam0 * t)).abs() < 0.02 * c.abs());
        }
    }

    #[test]
    fn weyl_preserves_support_and_matches_fourier_bessel() {
        for &pv in &[0.0, 0.5, 1.5, -0.25] {
            let p = Order::new(pv).unwrap();
            let tg = grid(401);
            let g = TimeProfile::from_fn(tg, 1.0, |t| (-(t * t) / 0.09).exp() * cutoff(t, 1.0)).unwrap();
            let w = weyl(&g, p).unwrap();
            for (i, v) in w.values.iter().enumerate() {
                if tg.value(i) > 1.0 {
                    assert!(v.abs() <= 1e-12 * g.max_abs());
                }
            }
            if pv >= 0.0 {
                let lams: Vec<f64> = (1..30).map(|k| 0.5 * k as f64).collect();
                let fb = fourier_bessel(&g, p, &lams).unwrap();
                let fc = cosine_transform(&w, &lams);
                for (a, b) in fb.iter().zip(&fc) {
                    if a.abs() > 1e-6 * fb[0].abs() {
                        assert!((a / b - 1.0).abs() < 1e-5, "p={pv}: {}", a / b);
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_weyl_round_trips() {
        for n in [2usize, 3] {
            let p = Order::new(n as f64 / 2.0 - 1.0).unwrap();
            let tg = grid(801);
            let g = gaussian(tg, 0.35);
            let back = inverse_weyl(&weyl(&g, p).unwrap(), n).unwrap();
            let mut err: f64 = 0.0;
            for i in 0..tg.len {
                if tg.value(i) > 0.05 {
                    err = err.max((back.values[i] - g.values[i]).abs());
                }
            }
            assert!(err < 1e-4 * g.max_abs(), "n={n}: {err}");
        }
    }

    /// U(t) = t² e^{-t²}: dU/d(t²) = (1 − t²) e^{-t²} exactly.
    #[test]
    fn tau_derivative_is_second_order() {
        let err = |n: usize| {
            let tg = UniformGrid::new(0.0, 3.0, n).unwrap();
            let u = TimeProfile::from_fn(tg, 3.0, |t| t * t * (-t * t).exp()).unwrap();
            let g = inverse_weyl(&u, 3).unwrap();
            (0..n)
                .map(|i| {
                    let t = tg.value(i);
                    (g.values[i] + 2.0 * (1.0 - t * t) * (-t * t).exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(201) / err(401);
        assert!(ratio > 3.5, "ratio {ratio}");
    }

    #[test]
    fn poisson_normalization_and_evenness() {
        let tg = grid(129);
        for &pv in &[0.0, 0.5, 1.5, 3.0] {
            let p = Order::new(pv).unwrap();
            let one = TimeProfile::new(tg, vec![1.0; 129], 2.0).unwrap();
            assert!(poisson(&one, p).unwrap().values.iter().all(|v| (v - 1.0).abs() < 1e-13));
            let g = poisson(&gaussian(tg, 0.5), p).unwrap();
            let h = tg.step();
            assert!(g.values[0].is_finite());
            // Even: the one-sided slope at 0 is O(h).
            assert!(((g.values[1] - g.values[0]) / h).abs() < 5.0 * h);
        }
    }

    #[test]
    fn inverse_poisson_round_trips() {
        for &pv in &[0.5, 1.5] {
            let p = Order::new(pv).unwrap();
            let tg = grid(513);
            let u = TimeProfile::from_fn(tg, 2.0, |t| (-(t * t) / 0.25).exp()).unwrap();
            let back = inverse_poisson(&poisson(&u, p).unwrap(), p).unwrap();
            let err = back.values.iter().zip(&u.values).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let nrm = u.values.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(err / nrm < 1e-4, "p={pv}: {}", err / nrm);
        }
        assert!(inverse_poisson(&gaussian(grid(65), 0.3), Order::new(1.0).unwrap()).is_err());
    }

    #[test]
    fn inverse_poisson_recovers_cosine() {
        let p = Order::new(1.5).unwrap();
        let tg = grid(513);
        let w = 3.0;
        let c = TimeProfile::from_fn(tg, 2.0, |t| (w * t).cos()).unwrap();
        let back = inverse_poisson(&poisson(&c, p).unwrap(), p).unwrap();
        for (i, v) in back.values.iter().enumerate() {
            assert!((v - (w * tg.value(i)).cos()).abs() < 1e-3);
        }
    }

    #[test]
    fn intertwining_residual_is_second_order() {
        let p = Order::new(0.5).unwrap();
        let res = |n: usize| {
            let tg = grid(n);
            let u = TimeProfile::from_fn(tg, 2.0, |t| (-(t * t) / 0.2).exp()).unwrap();
            let g = TimeProfile::from_fn(tg, 2.0, |t| (-(t * t) / 0.16).exp()).unwrap();
            intertwining_residuals(&u, &g, p, 0.25, 1.0).unwrap()
        };
        let (a1, b1) = res(201);
        let (a2, b2) = res(401);
        assert!(a1 / a2 > 3.5, "{}", a1 / a2);
        assert!(b1 / b2 > 3.5, "{}", b1 / b2);
    }

    #[test]
    fn decay_diagnostic_is_finite() {
        let p = Order::new(0.0).unwrap();
        let g = gaussian(grid(257), 0.3);
        let phi = fourier_bessel_profile(&g, p, UniformGrid::new(0.0, 100.0, 401).unwrap()).unwrap();
        assert!(decay_diagnostic(&phi, 4).is_finite());
    }
}
