//! Backward integration of the per-harmonic Darboux equation
//! `Ψ_tt + ((n−1)/t) Ψ_t = Ψ_rr + ((n−1+2m)/r) Ψ_r` from zero terminal data,
//! with the channel data as boundary values at `r = 1`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::phantom::PolarField;
use crate::range::HarmonicSpectrum;
use crate::transforms::interpolate_even;

/// Largest allowed `h_t / h_r`.
pub const CFL_LIMIT: f64 = 0.8;

/// Safety factor applied to the stability bound of the internal sub-steps.
const SUBSTEP_SAFETY: f64 = 0.9;

/// Settings of [`time_reversal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeReversalOptions {
    pub h_r: f64,
    pub h_t: f64,
    /// Stopping time; must lie in `[2 h_t, 10 h_t]`.
    pub epsilon: f64,
}

impl TimeReversalOptions {
    /// `h_t = h_r / 2`, `ε = 2 h_t`.
    pub fn with_h_r(h_r: f64) -> Self {
        let h_t = 0.5 * h_r;
        TimeReversalOptions { h_r, h_t, epsilon: 2.0 * h_t }
    }
}

/// Final state of the backward integration.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeReversalState {
    pub options: TimeReversalOptions,
    pub r_grid: UniformGrid,
    /// `Ψ(r_i, ε)` per channel.
    pub psi_epsilon: Vec<Vec<f64>>,
    /// Internal sub-steps per outer step, per channel.
    pub substeps: Vec<usize>,
    /// Number of outer steps from `T` to `ε`.
    pub steps: usize,
}

/// Reconstructs `f_{l,m}(r) = r^m [Ψ(r, ε) − (ε²/2) Ψ_tt(r, ε)]` for every channel.
///
/// `Ψ_tt(r, ε)` is taken from the even quadratic through the values at `ε`
/// and `ε + h`, where `h` is the last internal step.
pub fn time_reversal(spec: &HarmonicSpectrum, opts: TimeReversalOptions) -> Result<(PolarField, TimeReversalState)> {
    let TimeReversalOptions { h_r, h_t, epsilon } = opts;
    if !(h_r > 0.0) || !(h_t > 0.0) {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    if h_t > CFL_LIMIT * h_r * (1.0 + 1e-12) {
        return Err(Error::Cfl { h_t, limit: CFL_LIMIT * h_r });
    }
    if epsilon < 2.0 * h_t * (1.0 - 1e-12) || epsilon > 10.0 * h_t * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("ε = {epsilon} outside [2 h_t, 10 h_t]")));
    }
    let nr = (1.0 / h_r).round() as usize;
    if nr < 8 || ((nr as f64) * h_r - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("1/h_r = {} must be an integer ≥ 8", 1.0 / h_r)));
    }
    let r_grid = UniformGrid::new(0.0, 1.0, nr + 1)?;
    let t_end = spec.t_grid.end;
    let steps = ((t_end - epsilon) / h_t).round() as usize;
    if ((steps as f64) * h_t - (t_end - epsilon)).abs() > 1e-9 * t_end {
        return Err(Error::InvalidArgument(format!("(T − ε)/h_t = {} must be an integer", (t_end - epsilon) / h_t)));
    }
    let n = spec.n;
    let basis = spec.basis();
    let results: Vec<Result<(Vec<f64>, Vec<f64>, usize)>> = basis
        .channels()
        .par_iter()
        .enumerate()
        .map(|(c, &(m, l))| {
            let data = &spec.channels[c];
            let sub = substeps(n, m, h_r, h_t);
            let (psi, f) = integrate_channel(n, m, data, &spec.t_grid, nr, h_r, steps * sub, epsilon, t_end)
                .map_err(|t| Error::NonFinite { m, l, t })?;
            Ok((psi, f, sub))
        })
        .collect();
    let mut field = PolarField::zeros(n, spec.m_max, r_grid)?;
    let mut state = TimeReversalState { options: opts, r_grid, psi_epsilon: Vec::new(), substeps: Vec::new(), steps };
    for (c, res) in results.into_iter().enumerate() {
        let (psi, f, sub) = res?;
        field.coeffs[c] = f;
        state.psi_epsilon.push(psi);
        state.substeps.push(sub);
    }
    Ok((field, state))
}

/// Sub-steps per outer step so that `h² ρ(L) ≤ 4 · safety²`, with `ρ(L)`
/// bounded by the Gershgorin radius `4N/h_r²` of the axis row, `N = n + 2m`,
/// which dominates every other row.
fn substeps(n: usize, m: usize, h_r: f64, h_t: f64) -> usize {
    let big_n = (n + 2 * m) as f64;
    let rho = 4.0 * big_n.max(2.0) / (h_r * h_r);
    let h_max = SUBSTEP_SAFETY * 2.0 / rho.sqrt();
    (h_t / h_max).ceil().max(1.0) as usize
}

/// Leapfrog from `t = T` down to `t = ε` in `count` steps; returns `Ψ(·, ε)` and `f_{l,m}`.
/// On a non-finite value, returns the time at which it appeared.
#[allow(clippy::too_many_arguments)]
fn integrate_channel(
    n: usize,
    m: usize,
    data: &[f64],
    t_grid: &UniformGrid,
    nr: usize,
    h_r: f64,
    count: usize,
    epsilon: f64,
    t_end: f64,
) -> std::result::Result<(Vec<f64>, Vec<f64>), f64> {
    let h = (t_end - epsilon) / count as f64;
    let big_n = (n + 2 * m) as f64;
    let inv_h2 = 1.0 / (h_r * h_r);
    // Rows with i < (N − 1)/2 take a forward difference for Ψ_r so that all
    // off-diagonal couplings stay positive and the spectrum of the spatial
    // operator stays real and nonpositive.
    let split = 0.5 * (big_n - 1.0);
    let boundary = |t: f64| interpolate_even(t_grid, data, t);
    // Time levels k+1 (later) and k (current).
    let mut later = vec![0.0; nr + 1];
    let mut now = vec![0.0; nr + 1];
    later[nr] = boundary(t_end);
    now[nr] = boundary(t_end - h);
    let mut earlier = vec![0.0; nr + 1];
    let mut lap = vec![0.0; nr + 1];
    for k in 1..count {
        let t = t_end - k as f64 * h;
        lap[0] = 2.0 * big_n * (now[1] - now[0]) * inv_h2;
        for i in 1..nr {
            let r = i as f64 * h_r;
            let d2 = (now[i + 1] - 2.0 * now[i] + now[i - 1]) * inv_h2;
            let d1 = if (i as f64) < split {
                (now[i + 1] - now[i]) / h_r
            } else {
                (now[i + 1] - now[i - 1]) / (2.0 * h_r)
            };
            lap[i] = d2 + (big_n - 1.0) / r * d1;
        }
        let a = (n as f64 - 1.0) * h / (2.0 * t);
        for i in 0..nr {
            earlier[i] = (h * h * lap[i] + 2.0 * now[i] - (1.0 + a) * later[i]) / (1.0 - a);
        }
        earlier[nr] = boundary(t - h);
        if earlier.iter().any(|v| !v.is_finite()) {
            return Err(t - h);
        }
        std::mem::swap(&mut later, &mut now);
        std::mem::swap(&mut now, &mut earlier);
    }
    // `now` holds Ψ(ε), `later` holds Ψ(ε + h).
    let t1 = epsilon;
    let t2 = epsilon + h;
    let f = (0..=nr)
        .map(|i| {
            let b = (later[i] - now[i]) / (t2 * t2 - t1 * t1);
            let psi_tt = 2.0 * b;
            let r = i as f64 * h_r;
            r.powi(m as i32) * (now[i] - 0.5 * epsilon * epsilon * psi_tt)
        })
        .collect();
    Ok((now, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{phantom_spectrum, ZonalOptions};
    use crate::invert::compare_fields;
    use crate::phantom::{project_to_harmonics, Bump, Phantom};

    fn t_grid() -> UniformGrid {
        UniformGrid::new(0.0, 2.0, 257).unwrap()
    }

    #[test]
    fn rejects_cfl_and_epsilon_violations() {
        let spec = HarmonicSpectrum::zeros(2, 1, t_grid()).unwrap();
        let bad = TimeReversalOptions { h_r: 1.0 / 64.0, h_t: 0.9 / 64.0, epsilon: 1.8 / 64.0 };
        assert!(matches!(time_reversal(&spec, bad), Err(Error::Cfl { .. })));
        let mut o = TimeReversalOptions::with_h_r(1.0 / 64.0);
        o.epsilon = o.h_t;
        assert!(time_reversal(&spec, o).is_err());
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let spec = HarmonicSpectrum::zeros(3, 2, t_grid()).unwrap();
        let (f, st) = time_reversal(&spec, TimeReversalOptions::with_h_r(1.0 / 32.0)).unwrap();
        assert!(f.coeffs.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(st.psi_epsilon.len(), 9);
    }

    #[test]
    fn substeps_grow_with_degree() {
        assert_eq!(substeps(2, 0, 0.01, 0.005), 1);
        assert!(substeps(2, 8, 0.01, 0.005) > substeps(2, 2, 0.01, 0.005));
    }

    #[test]
    fn reconstructs_and_converges() {
        let ph = Phantom::new(3, 0.2, vec![Bump { center: [0.2, 0.1, -0.2], width: 0.15, amplitude: 1.0 }], vec![]).unwrap();
        let tg = UniformGrid::new(0.0, 2.0, 513).unwrap();
        let spec = phantom_spectrum(&ph, tg, 3, ZonalOptions::default()).unwrap();
        let err = |nr: usize| {
            let (f, _) = time_reversal(&spec, TimeReversalOptions::with_h_r(1.0 / nr as f64)).unwrap();
            let truth = project_to_harmonics(&ph, 3, nr + 1).unwrap();
            compare_fields(&truth, &f).unwrap().relative_l2
        };
        let (e1, e2) = (err(32), err(64));
        assert!(e2 < 0.1, "{e2}");
        assert!(e1 / e2 >= 1.7, "{e1} {e2}");
    }
}
