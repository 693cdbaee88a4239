//! Smooth test functions compactly supported in the unit ball and their
//! harmonic expansions on a radial grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{CenterGrid, UniformGrid};
use crate::specfun::quadrature::{gauss_legendre, simpson_weights};
use crate::specfun::{harmonic_count, HarmonicBasis, HarmonicIndex};

/// Default distance between the phantom support and the unit sphere.
pub const DEFAULT_MARGIN: f64 = 0.2;

/// Largest harmonic degree accepted by projections.
pub const MAX_DEGREE: usize = 32;

/// C∞ radial step: 1 for `r ≤ inner`, 0 for `r ≥ outer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothCutoff {
    pub inner: f64,
    pub outer: f64,
}

impl SmoothCutoff {
    pub fn from_margin(margin: f64) -> Self {
        SmoothCutoff { inner: 1.0 - margin, outer: 1.0 - 0.5 * margin }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.inner {
            return 1.0;
        }
        if r >= self.outer {
            return 0.0;
        }
        let u = (r - self.inner) / (self.outer - self.inner);
        let a = (-1.0 / (1.0 - u)).exp();
        let b = (-1.0 / u).exp();
        a / (a + b)
    }
}

/// Gaussian `amplitude · exp(-|x - center|² / width²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: [f64; 3],
    pub width: f64,
    pub amplitude: f64,
}

/// Single-channel term `amplitude · exp(-r²/width²) · r^m · Y_l^m(x̂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicTerm {
    pub m: usize,
    pub l: usize,
    pub width: f64,
    pub amplitude: f64,
}

impl HarmonicTerm {
    /// Radial factor `amplitude · exp(-r²/width²) · r^m`.
    pub fn radial(&self, r: f64) -> f64 {
        self.amplitude * (-(r * r) / (self.width * self.width)).exp() * r.powi(self.m as i32)
    }
}

/// Sum of Gaussian bumps and single-channel terms, multiplied by a smooth
/// cutoff that vanishes identically outside radius `1 - margin/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    pub n: usize,
    pub margin: f64,
    pub bumps: Vec<Bump>,
    pub harmonics: Vec<HarmonicTerm>,
}

impl Phantom {
    /// Phantom with no components.
    pub fn empty(n: usize, margin: f64) -> Result<Self> {
        Self::new(n, margin, Vec::new(), Vec::new())
    }

    pub fn new(n: usize, margin: f64, bumps: Vec<Bump>, harmonics: Vec<HarmonicTerm>) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Dimension(n));
        }
        if !(margin > 0.0 && margin <= 0.5) {
            return Err(Error::InvalidPhantom(format!("margin must lie in (0, 0.5], got {margin}")));
        }
        for (i, b) in bumps.iter().enumerate() {
            if !(b.width > 0.0) || !b.amplitude.is_finite() {
                return Err(Error::InvalidPhantom(format!("bump {i}: width must be positive")));
            }
            if n == 2 && b.center[2] != 0.0 {
                return Err(Error::InvalidPhantom(format!("bump {i}: 2D center has a z component")));
            }
            let c = norm3(&b.center);
            if c + 3.0 * b.width > 1.0 - margin + 1e-12 {
                return Err(Error::InvalidPhantom(format!(
                    "bump {i}: |center| + 3·width = {} exceeds 1 - margin = {}",
                    c + 3.0 * b.width,
                    1.0 - margin
                )));
            }
        }
        for (i, h) in harmonics.iter().enumerate() {
            HarmonicIndex::new(n, h.m, h.l)?;
            if h.m > MAX_DEGREE || !(h.width > 0.0) || !h.amplitude.is_finite() {
                return Err(Error::InvalidPhantom(format!("harmonic term {i}: bad degree or width")));
            }
        }
        Ok(Phantom { n, margin, bumps, harmonics })
    }

    pub fn cutoff(&self) -> SmoothCutoff {
        SmoothCutoff::from_margin(self.margin)
    }

    /// Radius beyond which the phantom is identically zero.
    pub fn support_radius(&self) -> f64 {
        self.cutoff().outer
    }

    pub fn is_zero(&self) -> bool {
        self.bumps.iter().all(|b| b.amplitude == 0.0) && self.harmonics.iter().all(|h| h.amplitude == 0.0)
    }

    /// Copy with every amplitude multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Phantom {
        let mut out = self.clone();
        out.bumps.iter_mut().for_each(|b| b.amplitude *= s);
        out.harmonics.iter_mut().for_each(|h| h.amplitude *= s);
        out
    }

    /// Copy rotated by `alpha` about the z axis; harmonic terms are rotated
    /// by mixing their cosine/sine partners, so only bump phantoms are accepted.
    pub fn rotated_2d(&self, alpha: f64) -> Result<Phantom> {
        if !self.harmonics.is_empty() {
            return Err(Error::InvalidArgument("rotation supports bump phantoms only".into()));
        }
        let (s, c) = alpha.sin_cos();
        let mut out = self.clone();
        for b in out.bumps.iter_mut() {
            let [x, y, z] = b.center;
            b.center = [c * x - s * y, s * x + c * y, z];
        }
        Ok(out)
    }

    /// Value of the phantom without the cutoff factor.
    pub fn eval_uncut(&self, x: &[f64]) -> f64 {
        let mut v = 0.0;
        for b in &self.bumps {
            let d2: f64 = (0..self.n).map(|i| (x[i] - b.center[i]).powi(2)).sum();
            v += b.amplitude * (-d2 / (b.width * b.width)).exp();
        }
        if !self.harmonics.is_empty() {
            let r = norm(&x[..self.n]);
            let m_max = self.harmonics.iter().map(|h| h.m).max().unwrap_or(0);
            let basis = HarmonicBasis::new(self.n, m_max).expect("validated dimension");
            let mut y = vec![0.0; basis.len()];
            let dir = unit_or_axis(&x[..self.n]);
            basis.eval_into(&dir, &mut y);
            for h in &self.harmonics {
                v += h.radial(r) * y[basis.index_of(h.m, h.l)];
            }
        }
        v
    }

    /// Phantom value at `x` (only the first `n` coordinates are read).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = norm(&x[..self.n]);
        let chi = self.cutoff().eval(r);
        if chi == 0.0 {
            return 0.0;
        }
        chi * self.eval_uncut(x)
    }

    /// `∫ y^α f(y) dy` for each exponent triple, by polar cubature.
    pub fn monomial_moments(&self, exponents: &[[usize; 3]]) -> Vec<f64> {
        let cut = self.cutoff();
        let max_deg = exponents.iter().map(|e| e[0] + e[1] + e[2]).max().unwrap_or(0);
        let angular = match self.n {
            2 => CenterGrid::circle(256 + 2 * max_deg).expect("valid"),
            _ => CenterGrid::sphere(64 + max_deg, 128 + 2 * max_deg).expect("valid"),
        };
        let panels = [(0.0, 0.5 * cut.inner), (0.5 * cut.inner, cut.inner), (cut.inner, cut.outer)];
        let gl = gauss_legendre(48 + max_deg);
        let nodes: Vec<(f64, f64)> = panels
            .iter()
            .flat_map(|&(a, b)| {
                let m = gl.mapped(a, b);
                m.nodes.into_iter().zip(m.weights).collect::<Vec<_>>()
            })
            .collect();
        let partial: Vec<Vec<f64>> = nodes
            .par_iter()
            .map(|&(r, wr)| {
                let mut acc = vec![0.0; exponents.len()];
                let jac = wr * r.powi(self.n as i32 - 1);
                for (p, &wa) in angular.points.iter().zip(&angular.weights) {
                    let y = [r * p[0], r * p[1], r * p[2]];
                    let f = self.eval(&y) * jac * wa;
                    if f == 0.0 {
                        continue;
                    }
                    for (a, e) in acc.iter_mut().zip(exponents) {
                        *a += f * y[0].powi(e[0] as i32) * y[1].powi(e[1] as i32) * y[2].powi(e[2] as i32);
                    }
                }
                acc
            })
            .collect();
        let mut out = vec![0.0; exponents.len()];
        for p in partial {
            for (o, v) in out.iter_mut().zip(p) {
                *o += v;
            }
        }
        out
    }
}

/// Free-function form of [`Phantom::eval`].
pub fn eval_phantom(ph: &Phantom, x: &[f64]) -> f64 {
    ph.eval(x)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn norm3(x: &[f64; 3]) -> f64 {
    norm(x)
}

/// `x/|x|`, or the first axis when `x = 0`.
pub(crate) fn unit_or_axis(x: &[f64]) -> Vec<f64> {
    let r = norm(x);
    if r == 0.0 {
        let mut e = vec![0.0; x.len()];
        e[0] = 1.0;
        e
    } else {
        x.iter().map(|v| v / r).collect()
    }
}

/// Function on the ball stored as harmonic coefficients `f_{l,m}(r_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField {
    pub n: usize,
    pub m_max: usize,
    pub r_grid: UniformGrid,
    /// One radial profile per channel, in [`HarmonicBasis`] order.
    pub coeffs: Vec<Vec<f64>>,
}

impl PolarField {
    pub fn zeros(n: usize, m_max: usize, r_grid: UniformGrid) -> Result<Self> {
        let basis = HarmonicBasis::new(n, m_max)?;
        Ok(PolarField { n, m_max, r_grid, coeffs: vec![vec![0.0; r_grid.len]; basis.len()] })
    }

    pub fn basis(&self) -> HarmonicBasis {
        HarmonicBasis::new(self.n, self.m_max).expect("validated dimension")
    }

    pub fn channel(&self, m: usize, l: usize) -> &[f64] {
        &self.coeffs[self.basis().index_of(m, l)]
    }

    pub fn channel_mut(&mut self, m: usize, l: usize) -> &mut Vec<f64> {
        let i = self.basis().index_of(m, l);
        &mut self.coeffs[i]
    }

    /// Synthesized value `Σ f_{l,m}(r) Y_l^m(x̂)` with linear interpolation in r.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = norm(&x[..self.n]);
        if r > self.r_grid.end {
            return 0.0;
        }
        let basis = self.basis();
        let mut y = vec![0.0; basis.len()];
        basis.eval_into(&unit_or_axis(&x[..self.n]), &mut y);
        self.coeffs
            .iter()
            .zip(&y)
            .map(|(c, yv)| self.r_grid.interpolate(c, r) * yv)
            .sum()
    }

    /// `∫ |f|² dx` via Parseval, radial weight `r^{n-1}`, Simpson in r.
    pub fn energy(&self) -> f64 {
        let w = simpson_weights(self.r_grid.len, self.r_grid.step());
        let rv = self.r_grid.values();
        self.coeffs.iter().map(|c| channel_energy(c, &w, &rv, self.n)).sum()
    }

    pub fn scaled(&self, s: f64) -> PolarField {
        let mut out = self.clone();
        out.coeffs.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    /// Least-squares estimate of `C` in `|f_{l,m}(r)| ≤ C r^m` over `r ≤ r_fit`.
    pub fn origin_growth_constant(&self, m: usize, l: usize, r_fit: f64) -> f64 {
        let c = self.channel(m, l);
        (1..self.r_grid.len)
            .map(|i| (self.r_grid.value(i), c[i]))
            .filter(|(r, _)| *r <= r_fit)
            .map(|(r, v)| v.abs() / r.powi(m as i32))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn channel_energy(c: &[f64], w: &[f64], r: &[f64], n: usize) -> f64 {
    c.iter()
        .zip(w)
        .zip(r)
        .map(|((v, w), r)| w * v * v * r.powi(n as i32 - 1))
        .sum()
}

/// Default angular quadrature for projections of phantom-scale functions.
pub fn default_projection_grid(n: usize, m_max: usize) -> Result<CenterGrid> {
    match n {
        2 => CenterGrid::circle((4 * m_max + 1).max(512)),
        3 => CenterGrid::sphere((m_max + 1).max(64), (2 * m_max + 1).max(128)),
        _ => Err(Error::Dimension(n)),
    }
}

/// Projects `f` onto the harmonics of degree `≤ m_max` at every radius of `r_grid`
/// using the angular rule `quad`.
pub fn project_function<F>(n: usize, m_max: usize, r_grid: UniformGrid, quad: &CenterGrid, f: F) -> Result<PolarField>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if m_max > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!("m_max {m_max} exceeds {MAX_DEGREE}")));
    }
    if quad.n != n {
        return Err(Error::Dimension(quad.n));
    }
    quad.check_exact_degree(m_max)?;
    let basis = HarmonicBasis::new(n, m_max)?;
    let k = basis.len();
    // Basis values at the quadrature directions, premultiplied by weights.
    let mut table = vec![0.0; quad.len() * k];
    for (i, p) in quad.points.iter().enumerate() {
        basis.eval_into(&p[..n], &mut table[i * k..(i + 1) * k]);
        for v in &mut table[i * k..(i + 1) * k] {
            *v *= quad.weights[i];
        }
    }
    let rows: Vec<Vec<f64>> = (0..r_grid.len)
        .into_par_iter()
        .map(|ir| {
            let r = r_grid.value(ir);
            let mut acc = vec![0.0; k];
            for (i, p) in quad.points.iter().enumerate() {
                let x = [r * p[0], r * p[1], r * p[2]];
                let v = f(&x[..n]);
                if v == 0.0 {
                    continue;
                }
                for (a, t) in acc.iter_mut().zip(&table[i * k..(i + 1) * k]) {
                    *a += v * t;
                }
            }
            acc
        })
        .collect();
    let mut coeffs = vec![vec![0.0; r_grid.len]; k];
    for (ir, row) in rows.into_iter().enumerate() {
        for (c, v) in coeffs.iter_mut().zip(row) {
            c[ir] = v;
        }
    }
    Ok(PolarField { n, m_max, r_grid, coeffs })
}

/// Harmonic coefficients of the phantom on `n_r` uniform radii of `[0, 1]`.
pub fn project_to_harmonics(ph: &Phantom, m_max: usize, n_r: usize) -> Result<PolarField> {
    if n_r < 32 {
        return Err(Error::GridTooCoarse(format!("projection needs N_r ≥ 32, got {n_r}")));
    }
    let quad = default_projection_grid(ph.n, m_max)?;
    project_to_harmonics_with(ph, m_max, UniformGrid::new(0.0, 1.0, n_r)?, &quad)
}

/// As [`project_to_harmonics`] with an explicit radial grid and angular rule.
pub fn project_to_harmonics_with(ph: &Phantom, m_max: usize, r_grid: UniformGrid, quad: &CenterGrid) -> Result<PolarField> {
    let mut field = project_function(ph.n, m_max, r_grid, quad, |x| ph.eval(x))?;
    for c in field.coeffs.iter_mut() {
        for v in c.iter_mut() {
            if v.abs() < 1e-300 {
                *v = 0.0;
            }
        }
    }
    Ok(field)
}

/// Smallest and largest bump width drawn by [`random_phantom`].
pub const RANDOM_WIDTH: (f64, f64) = (0.08, 0.16);

/// Named phantoms used by the command line and the test fixtures.
pub const PRESETS: [&str; 3] = ["three-bumps", "radial", "off-center"];

/// Named phantom in dimension `n` with the default margin.
pub fn preset(name: &str, n: usize) -> Result<Phantom> {
    let z = |x: f64, y: f64, z3: f64| if n == 3 { [x, y, z3] } else { [x, y, 0.0] };
    let bumps = match name {
        "three-bumps" => vec![
            Bump { center: z(0.3, 0.1, -0.1), width: 0.12, amplitude: 1.0 },
            Bump { center: z(-0.25, 0.35, 0.15), width: 0.1, amplitude: 0.7 },
            Bump { center: z(0.0, -0.4, 0.1), width: 0.08, amplitude: 0.5 },
        ],
        "radial" => vec![Bump { center: [0.0; 3], width: 0.2, amplitude: 1.0 }],
        "off-center" => vec![Bump { center: z(0.35, -0.2, 0.15), width: 0.1, amplitude: 1.0 }],
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown phantom preset `{other}` (known: {})",
                PRESETS.join(", ")
            )))
        }
    };
    Phantom::new(n, DEFAULT_MARGIN, bumps, Vec::new())
}

/// `count` bumps with unit-bounded amplitudes drawn from a seeded generator;
/// centers are placed so that every bump satisfies the support invariant.
pub fn random_phantom(n: usize, count: usize, seed: u64) -> Result<Phantom> {
    use rand::{Rng, SeedableRng};
    if n != 2 && n != 3 {
        return Err(Error::Dimension(n));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let bumps = (0..count)
        .map(|_| {
            let width = rng.random_range(RANDOM_WIDTH.0..RANDOM_WIDTH.1);
            let reach = 1.0 - DEFAULT_MARGIN - 3.0 * width;
            let center = loop {
                let mut c = [0.0; 3];
                for v in c.iter_mut().take(n) {
                    *v = rng.random_range(-reach..reach);
                }
                if norm3(&c) <= reach {
                    break c;
                }
            };
            let amplitude = rng.random_range(0.2..1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            Bump { center, width, amplitude }
        })
        .collect();
    Phantom::new(n, DEFAULT_MARGIN, bumps, Vec::new())
}

/// Number of channels with degree `≤ m_max`.
pub fn channel_count(n: usize, m_max: usize) -> usize {
    (0..=m_max).map(|m| harmonic_count(n, m)).sum()
}
