//! Quick invariant suite printed as a conformance table: special functions,
//! transform identities, file round trips and small end-to-end pipelines.

use std::fmt::Write as _;

use crate::error::Result;
use crate::forward::{forward_transform, phantom_spectrum, ZonalOptions};
use crate::grid::{CenterGrid, UniformGrid};
use crate::invert::{compare_fields, series_inversion, SeriesOptions};
use crate::io::{boundary_from_file, boundary_to_file, Provenance, SmrtFile};
use crate::phantom::{preset, project_to_harmonics, SmoothCutoff};
use crate::range::{harmonic_decompose, range_report, RangeConfig};
use crate::specfun::{bessel_zeros, normalized_j, Order};
use crate::transforms::{intertwining_residuals, weyl, TimeProfile};

/// First positive zero of `J_0`.
const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// Smallest accepted residual ratio under grid halving for a second-order scheme.
const SECOND_ORDER_RATIO: f64 = 3.5;

/// One line of the conformance table.
#[derive(Debug, Clone, PartialEq)]
pub struct SelftestRow {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    /// `true` when `value ≤ tolerance`, or `value ≥ tolerance` for ratio checks.
    pub at_least: bool,
}

impl SelftestRow {
    fn at_most(name: &'static str, value: f64, tolerance: f64) -> Self {
        SelftestRow { name, value, tolerance, at_least: false }
    }

    fn at_least(name: &'static str, value: f64, tolerance: f64) -> Self {
        SelftestRow { name, value, tolerance, at_least: true }
    }

    pub fn pass(&self) -> bool {
        if self.at_least {
            self.value >= self.tolerance
        } else {
            self.value <= self.tolerance
        }
    }
}

/// Runs the suite.
pub fn selftest() -> Result<Vec<SelftestRow>> {
    let mut rows = Vec::new();

    let z = bessel_zeros(Order::new(0.0)?, 1)?[0];
    rows.push(SelftestRow::at_most("bessel: first zero of J_0", (z - J0_FIRST_ZERO).abs(), 1e-12));
    let j = normalized_j(Order::new(0.5)?, 1e-3);
    rows.push(SelftestRow::at_most("bessel: j_{1/2}(λ) = sin λ / λ", (j - 1e-3f64.sin() / 1e-3).abs(), 1e-14));

    let p = Order::new(0.5)?;
    let res = |n: usize| -> Result<(f64, f64)> {
        let tg = UniformGrid::new(0.0, 2.0, n)?;
        let u = TimeProfile::from_fn(tg, 2.0, |t| (-(t * t) / 0.2).exp())?;
        let g = TimeProfile::from_fn(tg, 2.0, |t| (-(t * t) / 0.16).exp())?;
        intertwining_residuals(&u, &g, p, 0.25, 1.0)
    };
    let (a1, b1) = res(201)?;
    let (a2, b2) = res(401)?;
    rows.push(SelftestRow::at_least("intertwining: Poisson residual ratio", a1 / a2, SECOND_ORDER_RATIO));
    rows.push(SelftestRow::at_least("intertwining: Weyl residual ratio", b1 / b2, SECOND_ORDER_RATIO));

    let tg = UniformGrid::new(0.0, 2.0, 401)?;
    let cut = SmoothCutoff::from_margin(0.2);
    let g = TimeProfile::from_fn(tg, 1.0, |t| (-(t * t) / 0.09).exp() * cut.eval(0.8 + 0.2 * t))?;
    let w = weyl(&g, Order::new(0.0)?)?;
    let beyond = (0..tg.len).filter(|&i| tg.value(i) > 1.0).map(|i| w.values[i].abs()).fold(0.0, f64::max);
    rows.push(SelftestRow::at_most("weyl: output beyond support / scale", beyond / g.max_abs(), 1e-12));

    let ph = preset("three-bumps", 2)?;
    let tg = UniformGrid::new(0.0, 2.0, 257)?;
    let data = forward_transform(&ph, &CenterGrid::circle(64)?, tg)?;
    rows.push(SelftestRow::at_most("forward: max |g| for t ≥ 2", data.max_abs_beyond(2.0), 0.0));

    let back = boundary_from_file(&SmrtFile::parse(&boundary_to_file(&data, &Provenance::default()).to_text())?)?;
    let mismatch = if back == data { 0.0 } else { 1.0 };
    rows.push(SelftestRow::at_most("io: boundary file round trip mismatches", mismatch, 0.0));

    let config = RangeConfig { m_max: 8, ..RangeConfig::default() };
    let report = range_report(&data, &config)?;
    let bz = report.condition("bessel-zero").map_or(f64::INFINITY, |c| c.worst);
    rows.push(SelftestRow::at_most("range: bessel-zero residual of forward data", bz, config.bessel_zero_threshold));
    let zero = report_worst_on_zero(&data, &config)?;
    rows.push(SelftestRow::at_most("range: worst residual of zero data", zero, 0.0));

    let radial = preset("radial", 2)?;
    let tg = UniformGrid::new(0.0, 2.0, 513)?;
    let spec = phantom_spectrum(&radial, tg, 0, ZonalOptions::default())?;
    let (recon, _) = series_inversion(&spec, &SeriesOptions::new(129)?)?;
    let truth = project_to_harmonics(&radial, 0, 129)?;
    rows.push(SelftestRow::at_most("invert: series rel. L2 on radial phantom", compare_fields(&truth, &recon)?.relative_l2, 0.05));

    let spec_grid = harmonic_decompose(&data, 4)?;
    let spec_zonal = phantom_spectrum(&ph, data.t_grid, 4, ZonalOptions::default())?;
    rows.push(SelftestRow::at_most(
        "forward: zonal vs center-grid spectrum rel. L2",
        spec_zonal.relative_l2(&spec_grid)?,
        1e-6,
    ));
    Ok(rows)
}

fn report_worst_on_zero(like: &crate::forward::BoundaryData, config: &RangeConfig) -> Result<f64> {
    let zero = like.scaled(0.0);
    let r = range_report(&zero, config)?;
    Ok(r.conditions.iter().filter(|c| c.evaluated > 0).map(|c| c.worst).fold(0.0, f64::max))
}

/// Fixed-width table with one PASS/FAIL line per row.
pub fn format_table(rows: &[SelftestRow]) -> String {
    let mut s = format!("{:<52} {:>12} {:>4} {:>10}  result\n", "check", "value", "", "tolerance");
    for r in rows {
        let op = if r.at_least { ">=" } else { "<=" };
        let verdict = if r.pass() { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{:<52} {:>12.3e} {:>4} {:>10.1e}  {verdict}", r.name, r.value, op, r.tolerance);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let rows = selftest().unwrap();
        let table = format_table(&rows);
        assert!(rows.iter().all(SelftestRow::pass), "{table}");
        assert_eq!(table.lines().count(), rows.len() + 1);
    }
}
