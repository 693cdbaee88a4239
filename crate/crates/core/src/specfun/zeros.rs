//! Positive zeros of `J_p`.

use super::bessel::{bessel_j, Order};
use crate::error::{Error, Result};

/// Largest number of zeros returned by [`bessel_zeros`].
pub const MAX_ZEROS: usize = 200;

const SCAN_STEP: f64 = 0.25;

/// McMahon estimate of the `k`-th positive zero of `J_p`.
pub fn mcmahon_estimate(p: f64, k: usize) -> f64 {
    let beta = (k as f64 + 0.5 * p - 0.25) * std::f64::consts::PI;
    let mu = 4.0 * p * p;
    beta - (mu - 1.0) / (8.0 * beta)
}

/// First `count` positive zeros of `J_p`, ascending.
///
/// The axis is scanned in steps well below the minimal zero spacing, sign
/// changes are bracketed and then bisected to full precision.
pub fn bessel_zeros(p: Order, count: usize) -> Result<Vec<f64>> {
    if count == 0 || count > MAX_ZEROS {
        return Err(Error::InvalidArgument(format!(
            "zero count must be in 1..={MAX_ZEROS}, got {count}"
        )));
    }
    let pv = p.value();
    // j_{p,1} > √(p(p+2)) for p > 0, so the scan can start just below it.
    let start = if pv > 0.0 { 0.99 * (pv * (pv + 2.0)).sqrt() } else { 0.0 };
    let bound = mcmahon_estimate(pv, count) + pv + 10.0;
    let mut zeros = Vec::with_capacity(count);
    let mut lo = start.max(1e-6);
    let mut f_lo = bessel_j(p, lo);
    while zeros.len() < count {
        let hi = lo + SCAN_STEP;
        if hi > bound {
            return Err(Error::ZeroSearch {
                order: pv,
                index: zeros.len() + 1,
                lo: zeros.last().copied().unwrap_or(start),
                hi: bound,
            });
        }
        let f_hi = bessel_j(p, hi);
        if f_hi == 0.0 {
            zeros.push(hi);
            lo = hi + 1e-9;
            f_lo = bessel_j(p, lo);
            continue;
        }
        if f_lo.signum() != f_hi.signum() {
            zeros.push(bisect(p, lo, hi, f_lo));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(zeros)
}

fn bisect(p: Order, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = bessel_j(p, m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    // Pick the endpoint with the smaller residual.
    if bessel_j(p, a).abs() <= bessel_j(p, b).abs() {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn first_zero_of_j0() {
        let z = bessel_zeros(Order::new(0.0).unwrap(), 1).unwrap();
        assert!((z[0] - 2.404825557695773).abs() < 1e-13);
    }

    #[test]
    fn half_order_zeros_are_multiples_of_pi() {
        let z = bessel_zeros(Order::new(0.5).unwrap(), 3).unwrap();
        for (k, &x) in z.iter().enumerate() {
            assert!((x - (k + 1) as f64 * PI).abs() < 1e-13);
        }
        // J_{-1/2} ∝ cos x.
        let z = bessel_zeros(Order::new(-0.5).unwrap(), 4).unwrap();
        for (k, &x) in z.iter().enumerate() {
            assert!((x - (k as f64 + 0.5) * PI).abs() < 1e-13);
        }
    }

    #[test]
    fn zeros_are_increasing_with_small_residual_and_gaps_tend_to_pi() {
        for &p in &[0.0, 1.0, 2.5, 8.5, 40.0] {
            let order = Order::new(p).unwrap();
            let z = bessel_zeros(order, 60).unwrap();
            for w in z.windows(2) {
                assert!(w[1] > w[0]);
            }
            for &x in &z {
                let amp = (2.0 / (PI * x)).sqrt();
                assert!(bessel_j(order, x).abs() <= 1e-12 * amp, "p={p} x={x}");
            }
            let last_gap = z[59] - z[58];
            assert!((last_gap - PI).abs() < 0.1 * (1.0 + p * p / 100.0));
        }
    }

    #[test]
    fn count_is_validated() {
        assert!(bessel_zeros(Order::new(0.0).unwrap(), 0).is_err());
        assert!(bessel_zeros(Order::new(0.0).unwrap(), 201).is_err());
        assert_eq!(bessel_zeros(Order::new(0.0).unwrap(), 200).unwrap().len(), 200);
    }
}
