//! Harmonic decomposition of boundary data.

use crate::error::{Error, Result};
use crate::forward::BoundaryData;
use crate::grid::UniformGrid;
use crate::specfun::quadrature::simpson_weights;
use crate::specfun::HarmonicBasis;

/// Per-channel time profiles `g_{l,m}(t_j)` for `m ≤ m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    pub n: usize,
    pub m_max: usize,
    pub t_grid: UniformGrid,
    /// One profile per channel in [`HarmonicBasis`] order.
    pub channels: Vec<Vec<f64>>,
}

impl HarmonicSpectrum {
    pub fn new(n: usize, m_max: usize, t_grid: UniformGrid, channels: Vec<Vec<f64>>) -> Result<Self> {
        let basis = HarmonicBasis::new(n, m_max)?;
        if channels.len() != basis.len() || channels.iter().any(|c| c.len() != t_grid.len) {
            return Err(Error::InvalidArgument("spectrum shape does not match its grids".into()));
        }
        Ok(HarmonicSpectrum { n, m_max, t_grid, channels })
    }

    pub fn zeros(n: usize, m_max: usize, t_grid: UniformGrid) -> Result<Self> {
        let k = HarmonicBasis::new(n, m_max)?.len();
        Self::new(n, m_max, t_grid, vec![vec![0.0; t_grid.len]; k])
    }

    pub fn basis(&self) -> HarmonicBasis {
        HarmonicBasis::new(self.n, self.m_max).expect("validated dimension")
    }

    pub fn channel(&self, m: usize, l: usize) -> &[f64] {
        &self.channels[self.basis().index_of(m, l)]
    }

    pub fn channel_mut(&mut self, m: usize, l: usize) -> &mut Vec<f64> {
        let i = self.basis().index_of(m, l);
        &mut self.channels[i]
    }

    /// `∫_0^T g_{l,m}(t)² dt` per channel (Simpson).
    pub fn channel_energies(&self) -> Vec<f64> {
        let w = simpson_weights(self.t_grid.len, self.t_grid.step());
        self.channels
            .iter()
            .map(|c| c.iter().zip(&w).map(|(v, w)| w * v * v).sum())
            .collect()
    }

    /// Total energy `Σ_{l,m} ∫ g_{l,m}² dt`.
    pub fn energy(&self) -> f64 {
        self.channel_energies().iter().sum()
    }

    pub fn scaled(&self, s: f64) -> HarmonicSpectrum {
        let mut out = self.clone();
        out.channels.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    /// `a·self + b·other` on identical grids.
    pub fn combine(&self, a: f64, other: &HarmonicSpectrum, b: f64) -> Result<HarmonicSpectrum> {
        if self.n != other.n || self.m_max != other.m_max || self.t_grid != other.t_grid {
            return Err(Error::InvalidArgument("spectra live on different grids".into()));
        }
        let mut out = self.clone();
        for (c, o) in out.channels.iter_mut().zip(&other.channels) {
            for (x, y) in c.iter_mut().zip(o) {
                *x = a * *x + b * y;
            }
        }
        Ok(out)
    }

    /// Spectrum truncated to degree `m_max ≤ self.m_max`.
    pub fn truncated(&self, m_max: usize) -> HarmonicSpectrum {
        let m_max = m_max.min(self.m_max);
        let k = HarmonicBasis::new(self.n, m_max).expect("valid").len();
        HarmonicSpectrum { n: self.n, m_max, t_grid: self.t_grid, channels: self.channels[..k].to_vec() }
    }

    /// Relative L2 distance on `S × [0, T]` (Parseval over the channels).
    pub fn relative_l2(&self, reference: &HarmonicSpectrum) -> Result<f64> {
        let d = self.combine(1.0, reference, -1.0)?;
        let e = reference.energy();
        Ok(if e == 0.0 { d.energy().sqrt() } else { (d.energy() / e).sqrt() })
    }
}

/// `g_{l,m}(t_j) = ∫_S g(θ, t_j) Y_l^m(θ) dS(θ)` by the center quadrature.
pub fn harmonic_decompose(g: &BoundaryData, m_max: usize) -> Result<HarmonicSpectrum> {
    g.centers.check_exact_degree(m_max)?;
    let basis = HarmonicBasis::new(g.n, m_max)?;
    let k = basis.len();
    let nt = g.t_grid.len;
    let mut channels = vec![vec![0.0; nt]; k];
    let mut y = vec![0.0; k];
    for i in 0..g.centers.len() {
        basis.eval_into(g.centers.point(i), &mut y);
        let w = g.centers.weights[i];
        let row = g.row(i);
        for (c, yv) in channels.iter_mut().zip(&y) {
            let s = w * yv;
            for (a, v) in c.iter_mut().zip(row) {
                *a += s * v;
            }
        }
    }
    HarmonicSpectrum::new(g.n, m_max, g.t_grid, channels)
}

/// `∫_{S×[0,T]} g² dS dt` by the center weights and Simpson in t.
pub fn boundary_energy(g: &BoundaryData) -> f64 {
    let w = simpson_weights(g.t_grid.len, g.t_grid.step());
    (0..g.centers.len())
        .map(|i| g.centers.weights[i] * g.row(i).iter().zip(&w).map(|(v, w)| w * v * v).sum::<f64>())
        .sum()
}

/// Synthesizes boundary data on `centers` from a spectrum.
pub fn synthesize_boundary(spec: &HarmonicSpectrum, centers: &crate::grid::CenterGrid) -> Result<BoundaryData> {
    if centers.n != spec.n {
        return Err(Error::Dimension(centers.n));
    }
    let basis = spec.basis();
    let mut out = BoundaryData::zeros(centers.clone(), spec.t_grid);
    let mut y = vec![0.0; basis.len()];
    for i in 0..centers.len() {
        basis.eval_into(centers.point(i), &mut y);
        let row = out.row_mut(i);
        for (c, yv) in spec.channels.iter().zip(&y) {
            for (a, v) in row.iter_mut().zip(c) {
                *a += yv * v;
            }
        }
    }
    Ok(out)
}
