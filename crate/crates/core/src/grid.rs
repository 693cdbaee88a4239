//! Sampling grids: uniform 1D grids and quadrature grids of centers on the
//! unit sphere or on a general closed boundary.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::quadrature::gauss_legendre;

/// `len` equispaced samples of `[start, end]`, both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub start: f64,
    pub end: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, end: f64, len: usize) -> Result<Self> {
        if len < 2 || !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "uniform grid needs len ≥ 2 and end > start, got [{start}, {end}] with {len} points"
            )));
        }
        Ok(UniformGrid { start, end, len })
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.len - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.len {
            self.end
        } else {
            self.start + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }

    /// Linear interpolation of samples `y` (one per node) at `x`, clamped to the grid.
    pub fn interpolate(&self, y: &[f64], x: f64) -> f64 {
        let h = self.step();
        let s = ((x - self.start) / h).clamp(0.0, (self.len - 1) as f64);
        let i = (s.floor() as usize).min(self.len - 2);
        let a = s - i as f64;
        (1.0 - a) * y[i] + a * y[i + 1]
    }
}

/// Layout of a center grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterLayout {
    /// Trapezoid rule on the unit circle with `n_theta` points starting at angle `offset`.
    Circle { n_theta: usize, offset: f64 },
    /// Gauss-Legendre in the polar cosine times uniform azimuth on the unit sphere.
    Sphere { n_polar: usize, n_az: usize },
    /// Arbitrary closed curve or surface samples.
    General,
}

/// Quadrature grid of centers with weights and outward unit normals.
/// Points are stored with three coordinates; the third is 0 in 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterGrid {
    pub n: usize,
    pub layout: CenterLayout,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub normals: Vec<[f64; 3]>,
}

impl CenterGrid {
    /// Equispaced centers `θ_j = 2πj/N` on the unit circle.
    pub fn circle(n_theta: usize) -> Result<Self> {
        Self::circle_rotated(n_theta, 0.0)
    }

    /// Circle grid rotated by `alpha`.
    pub fn circle_rotated(n_theta: usize, alpha: f64) -> Result<Self> {
        if n_theta < 3 {
            return Err(Error::GridTooCoarse(format!("circle grid needs ≥ 3 points, got {n_theta}")));
        }
        let w = 2.0 * PI / n_theta as f64;
        let points: Vec<[f64; 3]> = (0..n_theta)
            .map(|j| {
                let th = alpha + w * j as f64;
                [th.cos(), th.sin(), 0.0]
            })
            .collect();
        Ok(CenterGrid {
            n: 2,
            layout: CenterLayout::Circle { n_theta, offset: alpha },
            normals: points.clone(),
            weights: vec![w; n_theta],
            points,
        })
    }

    /// Gauss-Legendre (polar cosine) × uniform (azimuth) grid on the unit sphere.
    pub fn sphere(n_polar: usize, n_az: usize) -> Result<Self> {
        if n_polar < 2 || n_az < 3 {
            return Err(Error::GridTooCoarse(format!(
                "sphere grid needs n_polar ≥ 2 and n_az ≥ 3, got {n_polar}×{n_az}"
            )));
        }
        let gl = gauss_legendre(n_polar);
        let dphi = 2.0 * PI / n_az as f64;
        let mut points = Vec::with_capacity(n_polar * n_az);
        let mut weights = Vec::with_capacity(n_polar * n_az);
        for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
            let s = (1.0 - x * x).sqrt();
            for k in 0..n_az {
                let phi = dphi * k as f64;
                points.push([s * phi.cos(), s * phi.sin(), x]);
                weights.push(w * dphi);
            }
        }
        Ok(CenterGrid {
            n: 3,
            layout: CenterLayout::Sphere { n_polar, n_az },
            normals: points.clone(),
            weights,
            points,
        })
    }

    /// Arbitrary boundary samples with quadrature weights and outward normals.
    pub fn general(n: usize, points: Vec<[f64; 3]>, weights: Vec<f64>, normals: Vec<[f64; 3]>) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Dimension(n));
        }
        if points.len() != weights.len() || points.len() != normals.len() || points.is_empty() {
            return Err(Error::InvalidArgument("points, weights and normals must have equal nonzero length".into()));
        }
        Ok(CenterGrid { n, layout: CenterLayout::General, points, weights, normals })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total weight, i.e. the surface measure of the boundary.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i][..self.n]
    }

    /// Checks that products of harmonics of degree `≤ m_max` are integrated exactly.
    pub fn check_exact_degree(&self, m_max: usize) -> Result<()> {
        match self.layout {
            CenterLayout::Circle { n_theta, .. } => {
                if n_theta < 2 * m_max + 1 {
                    return Err(Error::QuadratureOrder {
                        what: "circle center grid",
                        required: 2 * m_max + 1,
                        got: n_theta,
                    });
                }
            }
            CenterLayout::Sphere { n_polar, n_az } => {
                if n_polar < m_max + 1 {
                    return Err(Error::QuadratureOrder {
                        what: "polar Gauss-Legendre order",
                        required: m_max + 1,
                        got: n_polar,
                    });
                }
                if n_az < 2 * m_max + 1 {
                    return Err(Error::QuadratureOrder {
                        what: "azimuthal points",
                        required: 2 * m_max + 1,
                        got: n_az,
                    });
                }
            }
            CenterLayout::General => {
                return Err(Error::InvalidArgument(
                    "harmonic projection needs a circle or sphere center grid".into(),
                ))
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_basics() {
        let g = UniformGrid::new(0.0, 2.0, 5).unwrap();
        assert_eq!(g.step(), 0.5);
        assert_eq!(g.value(4), 2.0);
        assert_eq!(g.interpolate(&[0.0, 1.0, 2.0, 3.0, 4.0], 1.25), 2.5);
        assert!(UniformGrid::new(0.0, 0.0, 5).is_err());
    }

    #[test]
    fn sphere_weights_sum_to_area() {
        let s = CenterGrid::sphere(8, 16).unwrap();
        assert!((s.total_weight() - 4.0 * PI).abs() < 1e-13);
        let c = CenterGrid::circle(10).unwrap();
        assert!((c.total_weight() - 2.0 * PI).abs() < 1e-13);
        assert!(c.check_exact_degree(4).is_ok());
        assert!(c.check_exact_degree(5).is_err());
        assert!(s.check_exact_degree(7).is_ok());
        assert!(s.check_exact_degree(8).is_err());
    }
}
