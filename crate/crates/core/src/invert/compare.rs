//! Distances between reconstructed and reference fields.

use crate::error::Result;
use crate::grid::{CenterGrid, UniformGrid};
use crate::phantom::PolarField;
use crate::specfun::quadrature::simpson_weights;

/// Error metrics of a reconstruction against a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldComparison {
    /// `‖recon − truth‖₂ / ‖truth‖₂` over the ball.
    pub relative_l2: f64,
    /// `max |recon − truth| / max |truth|` over a polar sample set.
    pub relative_linf: f64,
    /// `(m, l, ‖Δf_{l,m}‖₂)` per channel of the reference.
    pub channels: Vec<(usize, usize, f64)>,
}

/// Compares two fields; `recon` is resampled onto the reference radii by
/// linear interpolation and missing channels count as zero.
pub fn compare_fields(truth: &PolarField, recon: &PolarField) -> Result<FieldComparison> {
    if truth.n != recon.n {
        return Err(crate::error::Error::Dimension(recon.n));
    }
    let n = truth.n;
    let m_max = truth.m_max.max(recon.m_max);
    let r_grid = truth.r_grid;
    let a = resample(truth, m_max, r_grid)?;
    let b = resample(recon, m_max, r_grid)?;
    let w = simpson_weights(r_grid.len, r_grid.step());
    let rw: Vec<f64> = (0..r_grid.len).map(|i| w[i] * r_grid.value(i).powi(n as i32 - 1)).collect();
    let basis = a.basis();
    let mut diff_total = 0.0;
    let mut truth_total = 0.0;
    let mut channels = Vec::with_capacity(basis.len());
    for (c, &(m, l)) in basis.channels().iter().enumerate() {
        let mut d = 0.0;
        let mut e = 0.0;
        for i in 0..r_grid.len {
            d += rw[i] * (a.coeffs[c][i] - b.coeffs[c][i]).powi(2);
            e += rw[i] * a.coeffs[c][i].powi(2);
        }
        diff_total += d;
        truth_total += e;
        channels.push((m, l, d.sqrt()));
    }
    let relative_l2 = if truth_total > 0.0 { (diff_total / truth_total).sqrt() } else { diff_total.sqrt() };

    let dirs = match n {
        2 => CenterGrid::circle((4 * m_max + 1).max(64))?,
        _ => CenterGrid::sphere((m_max + 1).max(16), (2 * m_max + 1).max(32))?,
    };
    let mut dmax = 0.0f64;
    let mut tmax = 0.0f64;
    let mut ya = vec![0.0; basis.len()];
    for p in &dirs.points {
        basis.eval_into(&p[..n], &mut ya);
        for i in 0..r_grid.len {
            let (mut va, mut vb) = (0.0, 0.0);
            for (c, y) in ya.iter().enumerate() {
                va += a.coeffs[c][i] * y;
                vb += b.coeffs[c][i] * y;
            }
            dmax = dmax.max((va - vb).abs());
            tmax = tmax.max(va.abs());
        }
    }
    let relative_linf = if tmax > 0.0 { dmax / tmax } else { dmax };
    Ok(FieldComparison { relative_l2, relative_linf, channels })
}

fn resample(f: &PolarField, m_max: usize, r_grid: UniformGrid) -> Result<PolarField> {
    let mut out = PolarField::zeros(f.n, m_max, r_grid)?;
    let src = f.basis();
    for (c, &(m, l)) in src.channels().iter().enumerate() {
        let dst = out.channel_mut(m, l);
        if f.r_grid == r_grid {
            dst.clone_from(&f.coeffs[c]);
        } else {
            for (i, v) in dst.iter_mut().enumerate() {
                *v = f.r_grid.interpolate(&f.coeffs[c], r_grid.value(i));
            }
        }
    }
    Ok(out)
}
