//! Aggregated range report.

use std::fmt::Write as _;

use crate::error::Result;
use crate::forward::BoundaryData;

use super::bessel_zero::{bessel_zero_residuals, spectral_samples, BesselZeroResidual};
use super::boundary::GeneralBoundary;
use super::moments::{
    check_growth, check_moment_ball_with_floor, check_recurrence, moment_polynomials, GrowthEstimate, MomentResidual,
    DEFAULT_ENERGY_FLOOR,
};
use super::orthogonality::{check_orthogonality, eigensolutions, OrthogonalityResidual};
use super::poly::monomials;
use super::spectrum::harmonic_decompose;

/// Default pass threshold for normalized residuals.
pub const DEFAULT_THRESHOLD: f64 = 1e-4;

/// Default bound on the normalized growth constant.
pub const DEFAULT_GROWTH_BOUND: f64 = 4.1;

/// Settings of [`range_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct RangeConfig {
    pub m_max: usize,
    pub k_max: usize,
    /// Bessel zeros per order.
    pub zeros: usize,
    /// Largest `m` of the eigen-solutions in the orthogonality check.
    pub orthogonality_m_max: usize,
    pub moment_threshold: f64,
    pub fit_threshold: f64,
    pub recurrence_threshold: f64,
    pub growth_bound: f64,
    pub orthogonality_threshold: f64,
    pub bessel_zero_threshold: f64,
    pub energy_floor: f64,
}

impl Default for RangeConfig {
    fn default() -> Self {
        RangeConfig {
            m_max: 8,
            k_max: 4,
            zeros: 10,
            orthogonality_m_max: 4,
            moment_threshold: DEFAULT_THRESHOLD,
            fit_threshold: DEFAULT_THRESHOLD,
            recurrence_threshold: DEFAULT_THRESHOLD,
            growth_bound: DEFAULT_GROWTH_BOUND,
            orthogonality_threshold: DEFAULT_THRESHOLD,
            bessel_zero_threshold: DEFAULT_THRESHOLD,
            energy_floor: DEFAULT_ENERGY_FLOOR,
        }
    }
}

/// Outcome of one condition family.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSummary {
    pub name: &'static str,
    /// Largest residual (or growth constant) over the applicable entries.
    pub worst: f64,
    pub threshold: f64,
    /// Number of entries that were evaluated.
    pub evaluated: usize,
    /// `None` when the condition could not be evaluated on this data.
    pub pass: Option<bool>,
}

/// Residual tables and pass/fail per condition.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeReport {
    pub n: usize,
    pub config: RangeConfig,
    /// `‖g‖²` over `S × [0, T]`.
    pub data_energy: f64,
    pub moment: Vec<MomentResidual>,
    /// Chained fit residual `‖M_k − Q_k‖/‖M_k‖` per `k`, empty when not enough centers.
    pub fit: Vec<f64>,
    pub recurrence: Vec<f64>,
    pub growth: Option<GrowthEstimate>,
    pub orthogonality: Vec<OrthogonalityResidual>,
    pub bessel_zero: Vec<BesselZeroResidual>,
    pub conditions: Vec<ConditionSummary>,
}

impl RangeReport {
    /// True if every evaluated condition passes.
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass != Some(false))
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionSummary> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Human-readable table: one summary block and the failing rows.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<14} {:>12} {:>12} {:>9} {:>6}", "condition", "worst", "threshold", "evaluated", "result");
        for c in &self.conditions {
            let verdict = match c.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "n/a",
            };
            let _ = writeln!(s, "{:<14} {:>12.4e} {:>12.4e} {:>9} {:>6}", c.name, c.worst, c.threshold, c.evaluated, verdict);
        }
        let fails: Vec<String> = self
            .bessel_zero
            .iter()
            .filter(|r| r.value.is_some_and(|v| v > self.config.bessel_zero_threshold))
            .map(|r| format!("bessel-zero m={} l={} j={} lambda={:.6} residual={:.4e}", r.m, r.l, r.j, r.lambda, r.value.unwrap_or(0.0)))
            .chain(
                self.orthogonality
                    .iter()
                    .filter(|r| r.value > self.config.orthogonality_threshold)
                    .map(|r| format!("orthogonality m={} l={} j={} lambda={:.6} residual={:.4e}", r.m, r.l, r.j, r.lambda, r.value)),
            )
            .chain(
                self.moment
                    .iter()
                    .filter(|r| r.value > self.config.moment_threshold)
                    .map(|r| format!("moment k={} m={} l={} residual={:.4e}", r.k, r.m, r.l, r.value)),
            )
            .collect();
        for f in fails {
            let _ = writeln!(s, "FAIL {f}");
        }
        s
    }

    /// Machine-parsable `key=value` summary lines.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut out = vec![format!("dim={}", self.n), format!("data_energy={:.16e}", self.data_energy)];
        for c in &self.conditions {
            let verdict = match c.pass {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "n/a",
            };
            out.push(format!("{}.worst={:.16e}", c.name, c.worst));
            out.push(format!("{}.threshold={:.16e}", c.name, c.threshold));
            out.push(format!("{}.evaluated={}", c.name, c.evaluated));
            out.push(format!("{}.result={verdict}", c.name));
        }
        out.push(format!("all_pass={}", self.all_pass()));
        out
    }
}

fn summarize(name: &'static str, values: impl Iterator<Item = f64>, threshold: f64) -> ConditionSummary {
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    for v in values {
        worst = worst.max(v);
        evaluated += 1;
    }
    ConditionSummary { name, worst, threshold, evaluated, pass: (evaluated > 0).then_some(worst <= threshold) }
}

/// Runs the decomposition and every check on boundary data from the unit sphere.
pub fn range_report(g: &BoundaryData, config: &RangeConfig) -> Result<RangeReport> {
    let spec = harmonic_decompose(g, config.m_max)?;
    let data_energy = super::spectrum::boundary_energy(g);
    let moment = check_moment_ball_with_floor(&spec, config.k_max, config.energy_floor)?;

    let boundary = GeneralBoundary::unit_sphere(g.centers.clone())?;
    let enough = g.centers.len() >= monomials(g.n, 2 * config.k_max).len();
    let (fit, recurrence, growth) = if enough {
        let ms = moment_polynomials(g, &boundary, config.k_max)?;
        let fit = ms.fits.iter().map(|f| f.chained.residual).collect();
        let rec = check_recurrence(&ms, &boundary);
        let growth = if config.k_max >= 3 { Some(check_growth(&ms, &boundary.interior_cloud())?) } else { None };
        (fit, rec, growth)
    } else {
        (Vec::new(), Vec::new(), None)
    };

    let eigs = eigensolutions(g.n, config.orthogonality_m_max.min(config.m_max), config.zeros)?;
    let orthogonality = check_orthogonality(g, &eigs)?;
    let bessel_zero = bessel_zero_residuals(&spectral_samples(&spec, config.zeros)?);

    let conditions = vec![
        summarize("moment", moment.iter().map(|r| r.value), config.moment_threshold),
        summarize("moment-fit", fit.iter().cloned(), config.fit_threshold),
        summarize("recurrence", recurrence.iter().cloned(), config.recurrence_threshold),
        summarize("growth", growth.iter().map(|g| g.normalized_m_hat), config.growth_bound),
        summarize("orthogonality", orthogonality.iter().map(|r| r.value), config.orthogonality_threshold),
        summarize("bessel-zero", bessel_zero.iter().filter_map(|r| r.value), config.bessel_zero_threshold),
    ];
    Ok(RangeReport {
        n: g.n,
        config: config.clone(),
        data_energy,
        moment,
        fit,
        recurrence,
        growth,
        orthogonality,
        bessel_zero,
        conditions,
    })
}
