//! Real orthonormal spherical harmonics on S^1 and S^2.
//!
//! In 2D the degree-`m` space is spanned by `cos mθ/√π` (l = 1) and
//! `sin mθ/√π` (l = 2), with `1/√(2π)` for m = 0. In 3D the index
//! `l ∈ 1..=2m+1` maps to the azimuthal order `μ = l − m − 1`: negative μ are
//! sine harmonics, μ = 0 is zonal, positive μ are cosine harmonics.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Dimension of the degree-`m` harmonic space on `S^{n-1}`.
pub fn harmonic_count(n: usize, m: usize) -> usize {
    match n {
        2 => {
            if m == 0 {
                1
            } else {
                2
            }
        }
        3 => 2 * m + 1,
        _ => 0,
    }
}

/// Validated `(n, m, l)` harmonic label, `l` one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicIndex {
    pub n: usize,
    pub m: usize,
    pub l: usize,
}

impl HarmonicIndex {
    pub fn new(n: usize, m: usize, l: usize) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Dimension(n));
        }
        if l == 0 || l > harmonic_count(n, m) {
            return Err(Error::HarmonicIndex { n, m, l });
        }
        Ok(HarmonicIndex { n, m, l })
    }
}

/// Legendre polynomial `P_m(x)`.
pub fn legendre_p(m: usize, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Evaluates a single harmonic at a unit direction.
pub fn eval_harmonic(idx: HarmonicIndex, direction: &[f64]) -> Result<f64> {
    let HarmonicIndex { n, m, l } = HarmonicIndex::new(idx.n, idx.m, idx.l)?;
    if direction.len() != n {
        return Err(Error::Dimension(direction.len()));
    }
    let norm: f64 = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, |d| = {norm}"
        )));
    }
    let basis = HarmonicBasis::new(n, m)?;
    let mut out = vec![0.0; basis.len()];
    basis.eval_into(direction, &mut out);
    Ok(out[basis.index_of(m, l)])
}

/// All harmonics of degree `≤ m_max`, channels ordered by `(m, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicBasis {
    pub n: usize,
    pub m_max: usize,
    channels: Vec<(usize, usize)>,
    offsets: Vec<usize>,
}

impl HarmonicBasis {
    pub fn new(n: usize, m_max: usize) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Dimension(n));
        }
        let mut channels = Vec::new();
        let mut offsets = Vec::with_capacity(m_max + 1);
        for m in 0..=m_max {
            offsets.push(channels.len());
            for l in 1..=harmonic_count(n, m) {
                channels.push((m, l));
            }
        }
        Ok(HarmonicBasis { n, m_max, channels, offsets })
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// `(m, l)` labels in storage order.
    pub fn channels(&self) -> &[(usize, usize)] {
        &self.channels
    }

    /// Storage position of channel `(m, l)`.
    pub fn index_of(&self, m: usize, l: usize) -> usize {
        self.offsets[m] + l - 1
    }

    /// Writes every basis value at the unit direction into `out`.
    pub fn eval_into(&self, direction: &[f64], out: &mut [f64]) {
        match self.n {
            2 => self.eval_circle(direction[1].atan2(direction[0]), out),
            _ => {
                let rho = direction[0].hypot(direction[1]);
                let phi = direction[1].atan2(direction[0]);
                self.eval_sphere(direction[2], rho, phi, out)
            }
        }
    }

    /// Circle harmonics at angle `theta`.
    pub fn eval_circle(&self, theta: f64, out: &mut [f64]) {
        let c = 1.0 / PI.sqrt();
        out[0] = 1.0 / (2.0 * PI).sqrt();
        for m in 1..=self.m_max {
            let (s, co) = (m as f64 * theta).sin_cos();
            let o = self.offsets[m];
            out[o] = c * co;
            out[o + 1] = c * s;
        }
    }

    /// Sphere harmonics at polar cosine `x`, polar sine `s ≥ 0` and azimuth `phi`.
    pub fn eval_sphere(&self, x: f64, s: f64, phi: f64, out: &mut [f64]) {
        let mm = self.m_max;
        // Fully normalized associated Legendre values, column by order μ.
        let mut diag = 1.0 / (4.0 * PI).sqrt();
        let sqrt2 = std::f64::consts::SQRT_2;
        for mu in 0..=mm {
            if mu > 0 {
                let muf = mu as f64;
                diag *= ((2.0 * muf + 1.0) / (2.0 * muf)).sqrt() * s;
            }
            let (sin_mu, cos_mu) = (mu as f64 * phi).sin_cos();
            let mut store = |m: usize, v: f64| {
                let o = self.offsets[m] + m; // zonal slot (l = m + 1)
                if mu == 0 {
                    out[o] = v;
                } else {
                    out[o + mu] = sqrt2 * v * cos_mu;
                    out[o - mu] = sqrt2 * v * sin_mu;
                }
            };
            store(mu, diag);
            if mu == mm {
                break;
            }
            let muf = mu as f64;
            let mut prev2 = diag;
            let mut prev1 = x * (2.0 * muf + 3.0).sqrt() * diag;
            store(mu + 1, prev1);
            for m in (mu + 2)..=mm {
                let mf = m as f64;
                let a = ((4.0 * mf * mf - 1.0) / (mf * mf - muf * muf)).sqrt();
                let b = (((mf - 1.0).powi(2) - muf * muf) / (4.0 * (mf - 1.0).powi(2) - 1.0)).sqrt();
                let v = a * (x * prev1 - b * prev2);
                store(m, v);
                prev2 = prev1;
                prev1 = v;
            }
        }
    }
}
