//! Dense Cartesian resampling of a field as CSV for external plotting.

use std::fmt::Write as _;

use crate::phantom::PolarField;

/// `x,y,value` rows on an `n × n` grid over `[-1, 1]²` (the `z = 0` slice in 3D);
/// points outside the unit ball get value 0.
pub fn field_to_csv(field: &PolarField, n: usize) -> String {
    let mut s = String::from("x,y,value\n");
    let n = n.max(2);
    let h = 2.0 / (n - 1) as f64;
    for j in 0..n {
        let y = -1.0 + h * j as f64;
        for i in 0..n {
            let x = -1.0 + h * i as f64;
            let v = if x * x + y * y <= 1.0 { field.eval(&[x, y, 0.0]) } else { 0.0 };
            let _ = writeln!(s, "{x:.6},{y:.6},{v:.16e}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;

    #[test]
    fn constant_field_csv() {
        let mut f = PolarField::zeros(2, 0, UniformGrid::new(0.0, 1.0, 5).unwrap()).unwrap();
        let mut y = [0.0];
        f.basis().eval_into(&[1.0, 0.0], &mut y);
        let y0 = y[0];
        f.coeffs[0].iter_mut().for_each(|v| *v = 1.0 / y0);
        let csv = field_to_csv(&f, 3);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 10);
        let centre: f64 = lines[5].split(',').nth(2).unwrap().parse().unwrap();
        assert!((centre - 1.0).abs() < 1e-12);
        assert!(lines[1].ends_with(",0.0000000000000000e0"));
    }
}
