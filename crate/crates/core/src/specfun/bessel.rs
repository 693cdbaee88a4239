//! Bessel functions of the first kind for real order p ≥ -1/2 and x ≥ 0.
//!
//! Three regimes: the power series for small arguments, Miller's backward
//! recurrence in the oscillatory transition zone, and the Hankel asymptotic
//! expansion once the argument dominates the order.

use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};

/// Bessel order `p`, validated to lie in `[-1/2, Order::MAX]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    /// Largest supported order.
    pub const MAX: f64 = 160.0;

    /// Explicit real order.
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || !(-0.5 - 1e-12..=Self::MAX).contains(&p) {
            return Err(Error::UnsupportedOrder(p));
        }
        Ok(Order(p.max(-0.5)))
    }

    /// Order `n/2 - 1 + m` attached to degree-`m` harmonics in dimension `n`.
    pub fn harmonic(n: usize, m: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Dimension(n));
        }
        Self::new(n as f64 / 2.0 - 1.0 + m as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `(x/2)^p / Γ(p+1)` computed in log space for large orders.
fn series_prefactor(p: f64, x: f64) -> f64 {
    if p == 0.0 {
        return 1.0;
    }
    if p < 30.0 && x > 1e-100 {
        (0.5 * x).powf(p) / gamma(p + 1.0)
    } else {
        (p * (0.5 * x).ln() - ln_gamma(p + 1.0)).exp()
    }
}

/// `Σ_k (-x²/4)^k / (k! (p+1)_k)`, the entire part of both J_p and j_p.
fn reduced_series(p: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * (p + k));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 500.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// The series is used while `x²/4 ≤ p + 1`, where it has no cancellation.
fn in_series_zone(p: f64, x: f64) -> bool {
    0.25 * x * x <= (p + 1.0).max(1.0)
}

fn in_asymptotic_zone(p: f64, x: f64) -> bool {
    x >= 30.0 && x >= 0.5 * p * p
}

/// Hankel expansion `J_p(x) = √(2/(πx)) (P cos χ − Q sin χ)`, χ = x − (p/2 + 1/4)π.
fn hankel(p: f64, x: f64) -> f64 {
    let mu = 4.0 * p * p;
    let eight_x = 8.0 * x;
    let mut pp = 1.0;
    let mut qq = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        // Terms alternate between Q (odd k) and P (even k) with sign (-1)^{⌊k/2⌋}.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            qq += sign * term;
        } else {
            pp += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * p + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (pp * chi.cos() - qq * chi.sin())
}

/// Miller backward recurrence normalized by `(x/2)^ν = Σ_j a_j J_{ν+2j}(x)`.
fn miller(p: f64, x: f64) -> f64 {
    let base = p.floor();
    let nu = p - base;
    let target = base as i64;
    let top = (x.max(p) + 25.0 + 12.0 * x.cbrt()).ceil() as usize + 2;
    let mut f = vec![0.0f64; top + 2];
    f[top] = 1e-300;
    let mut scale_hits = 0usize;
    for k in (1..=top).rev() {
        let v = 2.0 * (nu + k as f64) / x * f[k] - f[k + 1];
        f[k - 1] = v;
        if v.abs() > 1e250 {
            for item in f.iter_mut().skip(k - 1) {
                *item *= 1e-250;
            }
            scale_hits += 1;
        }
    }
    let _ = scale_hits;
    // a_0 = Γ(ν+1); a_j = (ν+2j) Γ(ν+j)/j! for j ≥ 1.
    let mut sum = gamma(nu + 1.0) * f[0];
    let mut c = gamma(nu + 1.0); // Γ(ν+j)/j! at j = 1
    let mut j = 1usize;
    while 2 * j <= top {
        sum += (nu + 2.0 * j as f64) * c * f[2 * j];
        c *= (nu + j as f64) / (j as f64 + 1.0);
        j += 1;
    }
    let norm = (0.5 * x).powf(nu) / sum;
    if target >= 0 {
        f[target as usize] * norm
    } else {
        // Only p = -1/2 reaches here: one more downward step to index -1.
        (2.0 * nu / x * f[0] - f[1]) * norm
    }
}

fn bessel_j_raw(p: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if p == 0.0 {
            1.0
        } else if p > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if p == -0.5 {
        return (2.0 / (std::f64::consts::PI * x)).sqrt() * x.cos();
    }
    if p == 0.5 {
        return (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
    }
    if in_series_zone(p, x) {
        series_prefactor(p, x) * reduced_series(p, x)
    } else if in_asymptotic_zone(p, x) {
        hankel(p, x)
    } else {
        miller(p, x)
    }
}

/// `J_p(x)` for `x ≥ 0`. Negative arguments are mapped through parity for
/// integer orders and to `|x|` otherwise; use [`normalized_j`] for the even
/// extension.
pub fn bessel_j(p: Order, x: f64) -> f64 {
    let pv = p.value();
    if x < 0.0 {
        let v = bessel_j_raw(pv, -x);
        if pv.fract() == 0.0 && (pv as i64) % 2 != 0 {
            return -v;
        }
        return v;
    }
    bessel_j_raw(pv, x)
}

/// Normalized Bessel function `j_p(x) = 2^p Γ(p+1) J_p(x) / x^p`, even in `x`.
pub fn normalized_j(p: Order, x: f64) -> f64 {
    let pv = p.value();
    let x = x.abs();
    if pv == -0.5 {
        return x.cos();
    }
    if pv == 0.5 {
        return if x < 1e-4 {
            reduced_series(pv, x)
        } else {
            x.sin() / x
        };
    }
    if in_series_zone(pv, x) {
        return reduced_series(pv, x);
    }
    let j = bessel_j_raw(pv, x);
    if pv == 0.0 {
        return j;
    }
    let log_scale = pv * std::f64::consts::LN_2 + ln_gamma(pv + 1.0) - pv * x.ln();
    j * log_scale.exp()
}

/// `d/dz j_p(z) = -z j_{p+1}(z) / (2(p+1))`.
pub fn normalized_j_derivative(p: Order, x: f64) -> f64 {
    let pv = p.value();
    let next = Order(pv + 1.0);
    -x * normalized_j(next, x) / (2.0 * (pv + 1.0))
}

/// Taylor coefficients of `j_p` in powers of `x²`: `j_p(x) = Σ C_k x^{2k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoeffs {
    pub p: Order,
    pub coeffs: Vec<f64>,
}

impl SeriesCoeffs {
    /// Coefficients `C_0..=C_K` with `C_k = (-1/4)^k / (k! (p+1)_k)`.
    pub fn new(p: Order, k_max: usize) -> Self {
        let pv = p.value();
        let mut coeffs = Vec::with_capacity(k_max + 1);
        let mut c = 1.0;
        coeffs.push(c);
        for k in 1..=k_max {
            let kf = k as f64;
            c *= -0.25 / (kf * (pv + kf));
            coeffs.push(c);
        }
        SeriesCoeffs { p, coeffs }
    }

    /// Evaluates the truncated series at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x2 + c)
    }
}
