//! Closed center boundaries used by the moment-condition family.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::CenterGrid;

/// Sampled closed curve or surface with outward normals, weights and the
/// observation time `T_Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralBoundary {
    pub grid: CenterGrid,
    pub t_max: f64,
}

impl GeneralBoundary {
    /// Boundary from a center grid; `T_Γ` must cover `max_x ρ(x)`.
    pub fn new(grid: CenterGrid, t_max: f64) -> Result<Self> {
        let b = GeneralBoundary { grid, t_max };
        let need = b.max_rho();
        if t_max < need - 1e-12 {
            return Err(Error::InvalidArgument(format!("T_Γ = {t_max} is below max ρ = {need}")));
        }
        Ok(b)
    }

    /// The unit circle or sphere carried by a harmonic center grid, `T = 2`.
    pub fn unit_sphere(grid: CenterGrid) -> Result<Self> {
        Self::new(grid, 2.0)
    }

    /// Ellipse `(a cos s, b sin s)` with `count` equispaced parameter samples.
    pub fn ellipse(a: f64, b: f64, count: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || count < 8 {
            return Err(Error::InvalidArgument("ellipse needs positive axes and ≥ 8 samples".into()));
        }
        let ds = 2.0 * PI / count as f64;
        let mut points = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        let mut normals = Vec::with_capacity(count);
        for j in 0..count {
            let s = ds * j as f64;
            let (sn, cs) = s.sin_cos();
            points.push([a * cs, b * sn, 0.0]);
            let speed = (a * a * sn * sn + b * b * cs * cs).sqrt();
            weights.push(speed * ds);
            normals.push([b * cs / speed, a * sn / speed, 0.0]);
        }
        let grid = CenterGrid::general(2, points, weights, normals)?;
        let diam = 2.0 * a.max(b);
        Self::new(grid, diam)
    }

    /// `ρ(x) = max_{y ∈ Γ} |x − y|` over the samples.
    pub fn rho(&self, x: &[f64]) -> f64 {
        self.grid
            .points
            .iter()
            .map(|p| (0..self.grid.n).map(|i| (p[i] - x[i]).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn max_rho(&self) -> f64 {
        // The sample set is symmetric enough that checking every sample suffices.
        self.grid.points.iter().map(|p| self.rho(&p[..self.grid.n])).fold(0.0, f64::max)
    }

    /// Deterministic cloud inside the domain: scaled copies of the boundary
    /// samples (the domains used here are star-shaped about the origin).
    pub fn interior_cloud(&self) -> Vec<[f64; 3]> {
        let mut out = vec![[0.0; 3]];
        let stride = (self.grid.len() / 64).max(1);
        for s in [0.25, 0.5, 0.75, 0.95] {
            for p in self.grid.points.iter().step_by(stride) {
                out.push([s * p[0], s * p[1], s * p[2]]);
            }
        }
        out
    }
}
