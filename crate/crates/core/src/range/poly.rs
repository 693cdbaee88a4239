//! Polynomials in the monomial basis, their Laplacian, and least-squares fits
//! on boundary samples.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Exponents of all monomials of total degree `≤ degree` in `n` variables,
/// ordered by degree.
pub fn monomials(n: usize, degree: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for d in 0..=degree {
        match n {
            2 => {
                for a in (0..=d).rev() {
                    out.push([a, d - a, 0]);
                }
            }
            _ => {
                for a in (0..=d).rev() {
                    for b in (0..=d - a).rev() {
                        out.push([a, b, d - a - b]);
                    }
                }
            }
        }
    }
    out
}

fn monomial_value(e: &[usize; 3], x: &[f64]) -> f64 {
    let mut v = 1.0;
    for (i, &k) in e.iter().enumerate() {
        if k > 0 {
            v *= x[i].powi(k as i32);
        }
    }
    v
}

/// `Σ c_α x^α` over all monomials of degree `≤ degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub n: usize,
    pub degree: usize,
    pub exps: Vec<[usize; 3]>,
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn zero(n: usize, degree: usize) -> Poly {
        let exps = monomials(n, degree);
        let coeffs = vec![0.0; exps.len()];
        Poly { n, degree, exps, coeffs }
    }

    pub fn from_coeffs(n: usize, degree: usize, coeffs: Vec<f64>) -> Poly {
        let exps = monomials(n, degree);
        assert_eq!(exps.len(), coeffs.len());
        Poly { n, degree, exps, coeffs }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.exps.iter().zip(&self.coeffs).map(|(e, c)| c * monomial_value(e, x)).sum()
    }

    /// Same polynomial in the basis of degree `degree ≥ self.degree`.
    pub fn lifted(&self, degree: usize) -> Poly {
        let mut out = Poly::zero(self.n, degree.max(self.degree));
        let idx = out.index();
        for (e, c) in self.exps.iter().zip(&self.coeffs) {
            out.coeffs[idx[e]] += c;
        }
        out
    }

    fn index(&self) -> HashMap<[usize; 3], usize> {
        self.exps.iter().enumerate().map(|(i, e)| (*e, i)).collect()
    }

    /// Symbolic Laplacian `Σ_i ∂²/∂x_i²`.
    pub fn laplacian(&self) -> Poly {
        let deg = self.degree.saturating_sub(2);
        let mut out = Poly::zero(self.n, deg);
        let idx = out.index();
        for (e, &c) in self.exps.iter().zip(&self.coeffs) {
            for i in 0..self.n {
                if e[i] >= 2 {
                    let mut f = *e;
                    f[i] -= 2;
                    out.coeffs[idx[&f]] += c * (e[i] * (e[i] - 1)) as f64;
                }
            }
        }
        out
    }

    /// `a·self + b·other`, in the larger basis.
    pub fn combine(&self, a: f64, other: &Poly, b: f64) -> Poly {
        let d = self.degree.max(other.degree);
        let mut x = self.lifted(d);
        let y = other.lifted(d);
        for (u, v) in x.coeffs.iter_mut().zip(&y.coeffs) {
            *u = a * *u + b * v;
        }
        x
    }
}

/// Matrix of the Laplacian from degree `d` to degree `d − 2` coefficients.
fn laplacian_matrix(n: usize, d: usize) -> DMatrix<f64> {
    let cols = monomials(n, d).len();
    let rows = monomials(n, d.saturating_sub(2)).len();
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        let mut c = vec![0.0; cols];
        c[j] = 1.0;
        let l = Poly::from_coeffs(n, d, c).laplacian();
        for i in 0..rows {
            m[(i, j)] = l.coeffs[i];
        }
    }
    m
}

/// Outcome of a least-squares polynomial fit.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub poly: Poly,
    /// Weighted `‖Q|_Γ − M‖ / ‖M‖` (0 for vanishing data).
    pub residual: f64,
    /// Ratio of largest to smallest retained singular value.
    pub condition: f64,
    /// Number of retained singular values.
    pub rank: usize,
}

/// Relative singular-value cutoff of the truncated decompositions.
const SVD_CUTOFF: f64 = 1e-11;

fn design(points: &[[f64; 3]], weights: &[f64], n: usize, exps: &[[usize; 3]]) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), exps.len(), |i, j| weights[i].sqrt() * monomial_value(&exps[j], &points[i][..n]))
}

/// Truncated-SVD least squares with column scaling; returns (solution, condition, rank).
fn solve_ls(a: DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64, usize)> {
    let cols = a.ncols();
    let scales: Vec<f64> = (0..cols).map(|j| a.column(j).norm().max(1e-300)).collect();
    let mut a = a;
    for j in 0..cols {
        let s = scales[j];
        a.column_mut(j).iter_mut().for_each(|v| *v /= s);
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok((DVector::zeros(cols), 1.0, 0));
    }
    let tol = SVD_CUTOFF * smax;
    let u = svd.u.as_ref().ok_or_else(|| Error::InvalidArgument("SVD failed".into()))?;
    let vt = svd.v_t.as_ref().ok_or_else(|| Error::InvalidArgument("SVD failed".into()))?;
    let mut x = DVector::zeros(cols);
    let mut rank = 0;
    let mut smin = smax;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            rank += 1;
            smin = smin.min(s);
            let coef = u.column(k).dot(b) / s;
            x += vt.row(k).transpose() * coef;
        }
    }
    for j in 0..cols {
        x[j] /= scales[j];
    }
    Ok((x, smax / smin, rank))
}

fn weighted_residual(poly: &Poly, points: &[[f64; 3]], weights: &[f64], values: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((p, w), v) in points.iter().zip(weights).zip(values) {
        num += w * (poly.eval(&p[..poly.n]) - v).powi(2);
        den += w * v * v;
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Unconstrained fit of a degree-`≤ degree` polynomial to samples.
pub fn fit_polynomial(n: usize, degree: usize, points: &[[f64; 3]], weights: &[f64], values: &[f64]) -> Result<PolyFit> {
    let exps = monomials(n, degree);
    let a = design(points, weights, n, &exps);
    let b = DVector::from_iterator(values.len(), values.iter().zip(weights).map(|(v, w)| v * w.sqrt()));
    let (x, condition, rank) = solve_ls(a, &b)?;
    let poly = Poly::from_coeffs(n, degree, x.iter().cloned().collect());
    let residual = weighted_residual(&poly, points, weights, values);
    Ok(PolyFit { poly, residual, condition, rank })
}

/// Fit of `Q` of degree `≤ degree` subject to `ΔQ = rhs` exactly: a particular
/// solution plus the best harmonic polynomial of degree `≤ degree`.
pub fn fit_with_laplacian(
    n: usize,
    degree: usize,
    rhs: &Poly,
    points: &[[f64; 3]],
    weights: &[f64],
    values: &[f64],
) -> Result<PolyFit> {
    let cols = monomials(n, degree).len();
    let lap = laplacian_matrix(n, degree);
    let target = rhs.lifted(degree.saturating_sub(2));
    if target.degree > degree.saturating_sub(2) {
        return Err(Error::InvalidArgument("Laplacian target degree too high".into()));
    }
    let svd = lap.clone().svd(true, true);
    let vt = svd.v_t.as_ref().expect("requested");
    let u = svd.u.as_ref().expect("requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let b = DVector::from_vec(target.coeffs.clone());
    let mut particular = DVector::zeros(cols);
    let mut range_rows = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > 1e-12 * smax {
            particular += vt.row(k).transpose() * (u.column(k).dot(&b) / s);
            range_rows.push(k);
        }
    }
    // Nullspace of Δ: complement of the row space in coefficient space.
    let full = nalgebra::DMatrix::<f64>::identity(cols, cols);
    let mut null: Vec<DVector<f64>> = Vec::new();
    let row_space: Vec<DVector<f64>> = range_rows.iter().map(|&k| vt.row(k).transpose()).collect();
    for j in 0..cols {
        let mut v: DVector<f64> = full.column(j).into();
        for r in row_space.iter().chain(null.iter()) {
            let d = r.dot(&v);
            v -= r * d;
        }
        for r in row_space.iter().chain(null.iter()) {
            let d = r.dot(&v);
            v -= r * d;
        }
        let nv = v.norm();
        if nv > 1e-8 {
            null.push(v / nv);
        }
        if row_space.len() + null.len() == cols {
            break;
        }
    }
    let part_poly = Poly::from_coeffs(n, degree, particular.iter().cloned().collect());
    let resid_values: Vec<f64> = points
        .iter()
        .zip(values)
        .map(|(p, v)| v - part_poly.eval(&p[..n]))
        .collect();
    let exps = monomials(n, degree);
    let basis_vals = design(points, weights, n, &exps);
    let nm = DMatrix::from_columns(&null);
    let a = &basis_vals * &nm;
    let bvec = DVector::from_iterator(values.len(), resid_values.iter().zip(weights).map(|(v, w)| v * w.sqrt()));
    let (h, condition, rank) = solve_ls(a, &bvec)?;
    let coeffs = particular + nm * h;
    let poly = Poly::from_coeffs(n, degree, coeffs.iter().cloned().collect());
    let residual = weighted_residual(&poly, points, weights, values);
    Ok(PolyFit { poly, residual, condition, rank })
}
