//! Orthogonality of boundary data to the normal derivatives of the separated
//! Darboux solutions `u_λ = ψ_λ(x) j_{n/2−1}(λt)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::BoundaryData;
use crate::specfun::quadrature::simpson_weights;
use crate::specfun::{
    bessel_zeros, eigen_radial, eigen_radial_derivative, eval_harmonic, harmonic_count, normalized_j, HarmonicIndex,
    Order,
};

/// Dirichlet eigenfunction `ψ_λ(rθ) = (λr)^m j_{n/2−1+m}(λr) Y_l^m(θ)` with
/// `λ` a positive zero of `J_{m+n/2−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSolution {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub lambda: f64,
    /// One-based index of the zero.
    pub j: usize,
}

impl EigenSolution {
    /// Eigen-solution built on the `j`-th zero of `J_{m+n/2−1}`.
    pub fn new(n: usize, m: usize, l: usize, j: usize) -> Result<Self> {
        HarmonicIndex::new(n, m, l)?;
        if j == 0 {
            return Err(Error::InvalidArgument("zero index is one-based".into()));
        }
        let lambda = bessel_zeros(Order::harmonic(n, m)?, j)?[j - 1];
        Ok(EigenSolution { n, m, l, lambda, j })
    }

    fn harmonic(&self, dir: &[f64]) -> f64 {
        eval_harmonic(HarmonicIndex { n: self.n, m: self.m, l: self.l }, dir).expect("unit direction")
    }

    /// `ψ_λ(x)`.
    pub fn psi(&self, x: &[f64]) -> f64 {
        let r = crate::phantom::norm(x);
        if r == 0.0 {
            return if self.m == 0 { self.harmonic(&unit_axis(self.n)) } else { 0.0 };
        }
        let dir: Vec<f64> = x.iter().map(|v| v / r).collect();
        eigen_radial(self.n, self.m, self.lambda, r) * self.harmonic(&dir)
    }

    /// `u_λ(x, t) = ψ_λ(x) j_{n/2−1}(λt)`.
    pub fn u(&self, x: &[f64], t: f64) -> f64 {
        self.psi(x) * normalized_j(Order::harmonic(self.n, 0).expect("valid"), self.lambda * t)
    }

    /// `∂_r [(λr)^m j_{n/2−1+m}(λr)]` at `r = 1`.
    pub fn radial_derivative_at_boundary(&self) -> f64 {
        eigen_radial_derivative(self.n, self.m, self.lambda, 1.0)
    }

    /// `∂_ν u_λ(θ, t)` on the lateral boundary of the cylinder.
    pub fn normal_derivative(&self, theta: &[f64], t: f64) -> f64 {
        self.radial_derivative_at_boundary()
            * self.harmonic(theta)
            * normalized_j(Order::harmonic(self.n, 0).expect("valid"), self.lambda * t)
    }
}

fn unit_axis(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[n - 1] = 1.0;
    v
}

/// All eigen-solutions with `m ≤ m_max`, every `l`, and the first `count` zeros.
pub fn eigensolutions(n: usize, m_max: usize, count: usize) -> Result<Vec<EigenSolution>> {
    let mut out = Vec::new();
    for m in 0..=m_max {
        let zeros = bessel_zeros(Order::harmonic(n, m)?, count)?;
        for l in 1..=harmonic_count(n, m) {
            for (j, &lambda) in zeros.iter().enumerate() {
                out.push(EigenSolution { n, m, l, lambda, j: j + 1 });
            }
        }
    }
    Ok(out)
}

/// Orthogonality residual of one eigen-solution.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityResidual {
    pub m: usize,
    pub l: usize,
    pub j: usize,
    pub lambda: f64,
    /// `|∫_{S×[0,T]} g ∂_ν u_λ t^{n−1} dS dt|`.
    pub raw: f64,
    /// `raw / (‖g‖ ‖∂_ν u_λ‖)` with norms weighted by `t^{n−1}`.
    pub value: f64,
}

/// Residuals of `∫ g ∂_ν u_λ t^{n−1} = 0` for each eigen-solution.
pub fn check_orthogonality(g: &BoundaryData, eigs: &[EigenSolution]) -> Result<Vec<OrthogonalityResidual>> {
    if let Some(e) = eigs.iter().find(|e| e.n != g.n) {
        return Err(Error::Dimension(e.n));
    }
    let n = g.n;
    let grid = g.t_grid;
    let w = simpson_weights(grid.len, grid.step());
    let tw: Vec<f64> = (0..grid.len).map(|j| w[j] * grid.value(j).powi(n as i32 - 1)).collect();
    let g_norm = (0..g.centers.len())
        .map(|i| g.centers.weights[i] * g.row(i).iter().zip(&tw).map(|(v, w)| w * v * v).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    let p0 = Order::harmonic(n, 0)?;
    eigs.par_iter()
        .map(|e| {
            let jt: Vec<f64> = (0..grid.len).map(|j| normalized_j(p0, e.lambda * grid.value(j))).collect();
            let dr = e.radial_derivative_at_boundary();
            let mut acc = 0.0;
            for i in 0..g.centers.len() {
                let y = e.harmonic(g.centers.point(i));
                let s: f64 = g.row(i).iter().zip(&jt).zip(&tw).map(|((v, j), w)| v * j * w).sum();
                acc += g.centers.weights[i] * y * s;
            }
            let raw = (dr * acc).abs();
            let j_norm = jt.iter().zip(&tw).map(|(j, w)| j * j * w).sum::<f64>().sqrt();
            let u_norm = dr.abs() * j_norm;
            let value = if g_norm == 0.0 || u_norm == 0.0 { 0.0 } else { raw / (g_norm * u_norm) };
            Ok(OrthogonalityResidual { m: e.m, l: e.l, j: e.j, lambda: e.lambda, raw, value })
        })
        .collect()
}
