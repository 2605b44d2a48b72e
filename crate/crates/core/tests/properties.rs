use involutions::construct::{from_even_function, invert_monotone};
use involutions::involution::{catalog, homothety};
use involutions::isochrony::potential_from_involution;
use involutions::{presets, Interval, RealFunction};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn piecewise_linear_is_involutive(lambda in 0.05f64..20.0, x in -1e3f64..1e3) {
        let h = catalog("piecewise_linear", &[lambda]).unwrap();
        let back = h.eval(h.eval(x).unwrap()).unwrap();
        prop_assert!((back - x).abs() <= 1e-10 * (1.0 + x.abs()));
    }

    #[test]
    fn rational_is_decreasing(a in -3.0f64..3.0, u in 0.01f64..0.99, v in 0.01f64..0.99) {
        let h = catalog("rational", &[a]).unwrap();
        let grid = h.domain().sample_interior(999);
        let (i, j) = ((u * 998.0) as usize, (v * 998.0) as usize);
        prop_assume!(i < j);
        prop_assert!(h.eval(grid[i]).unwrap() > h.eval(grid[j]).unwrap());
    }

    #[test]
    fn homothety_stays_involutive(a in 0.1f64..10.0, x in -0.99f64..2.99) {
        let h = homothety(&catalog("parabolic", &[]).unwrap(), a).unwrap();
        let y = x / a;
        let back = h.eval(h.eval(y).unwrap()).unwrap();
        prop_assert!((back - y).abs() <= 1e-9 * (1.0 + y.abs()));
    }

    #[test]
    fn potential_is_level_symmetric(omega in 0.2f64..5.0, x in -0.99f64..2.99) {
        let h = catalog("parabolic", &[]).unwrap();
        let pot = potential_from_involution(&h, omega).unwrap();
        let (a, b) = (pot.v().eval(x).unwrap(), pot.v().eval(h.eval(x).unwrap()).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn inversion_round_trips(y in -0.99f64..0.99) {
        let k = RealFunction::new(Interval::symmetric(1.0).unwrap(), |y: f64| y + y.powi(3) / 3.0);
        let x = y + y.powi(3) / 3.0;
        let got = invert_monotone(&k, x, k.domain(), 1e-14).unwrap();
        prop_assert!((got - y).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn constructed_h_matches_lambda(lambda in 0.2f64..5.0) {
        let c = from_even_function(&presets::even("abs_lambda", &[lambda]).unwrap()).unwrap();
        let s = 1e-3;
        let slope_right = c.h.eval(s).unwrap() / s;
        prop_assert!((slope_right + lambda).abs() <= 1e-9 * lambda);
    }
}
