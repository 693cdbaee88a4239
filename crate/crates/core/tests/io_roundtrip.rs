//! Property tests: every file kind reproduces its payload bit for bit.

use proptest::prelude::*;
use smrt_core::forward::BoundaryData;
use smrt_core::grid::{CenterGrid, UniformGrid};
use smrt_core::io::{boundary_from_file, boundary_to_file, parse_phantom, phantom_to_string, Provenance, SmrtFile};
use smrt_core::phantom::{Bump, Phantom};
use smrt_core::range::GeneralBoundary;

fn provenance() -> Provenance {
    Provenance { command: "smrt forward x".into(), config_hash: "00ff".into(), config: vec![("n_t".into(), "9".into())] }
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), Just(0.0), Just(-0.0), Just(f64::MIN_POSITIVE)]
}

fn check_boundary(g: &BoundaryData) {
    let text = boundary_to_file(g, &provenance()).to_text();
    let back = boundary_from_file(&SmrtFile::parse(&text).unwrap()).unwrap();
    assert_eq!(back.values.len(), g.values.len());
    for (a, b) in back.values.iter().zip(&g.values) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert_eq!(back.centers, g.centers);
    assert_eq!(back.t_grid, g.t_grid);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn circle_data_round_trips(n_theta in 3usize..12, n_t in 2usize..9, offset in -3.0f64..3.0, seed in prop::collection::vec(finite(), 100)) {
        let mut g = BoundaryData::zeros(CenterGrid::circle_rotated(n_theta, offset).unwrap(), UniformGrid::new(0.0, 2.0, n_t).unwrap());
        g.values.iter_mut().zip(seed.iter().cycle()).for_each(|(v, s)| *v = *s);
        check_boundary(&g);
    }

    #[test]
    fn ellipse_data_round_trips(a in 0.5f64..1.5, b in 0.3f64..1.2, count in 8usize..20, seed in prop::collection::vec(finite(), 40)) {
        let e = GeneralBoundary::ellipse(a, b, count).unwrap();
        let mut g = BoundaryData::zeros(e.grid, UniformGrid::new(0.0, e.t_max, 5).unwrap());
        g.values.iter_mut().zip(seed.iter().cycle()).for_each(|(v, s)| *v = *s);
        check_boundary(&g);
    }

    #[test]
    fn phantom_text_round_trips(x in -0.2f64..0.2, y in -0.2f64..0.2, z in -0.2f64..0.2, width in 0.05f64..0.15, amp in -2.0f64..2.0) {
        let ph = Phantom::new(3, 0.1, vec![Bump { center: [x, y, z], width, amplitude: amp }], Vec::new()).unwrap();
        prop_assert_eq!(parse_phantom(&phantom_to_string(&ph)).unwrap(), ph);
    }
}
