use involutions::fd::derivative9;
use involutions::involution::{catalog, catalog_examples};
use involutions::isochrony::{
    energy_grid, involution_from_potential, period, period_return_map, potential_from_involution, turning_points,
    verify_isochrony, Potential,
};
use involutions::{presets, Interval, RealFunction};

/// ∫₀¹ du/√(1 − u⁴)
const QUARTIC_INTEGRAL: f64 = 1.3110287771460599;

fn pure_quartic() -> Potential {
    let real = Interval::real();
    Potential::new(
        "x4",
        RealFunction::new(real, |x: f64| 0.25 * x.powi(4)),
        RealFunction::new(real, |x: f64| x.powi(3)),
        Some(1.0),
    )
    .unwrap()
}

#[test]
fn quartic_period_closed_form() {
    let pot = pure_quartic();
    for e in [0.01f64, 0.25, 2.0] {
        let xp = (4.0 * e).powf(0.25);
        let want = 4.0 * xp / (2.0 * e).sqrt() * QUARTIC_INTEGRAL;
        let t = period(&pot, e).unwrap();
        assert!((t - want).abs() <= 1e-9 * want, "E = {e}: {t} vs {want}");
    }
}

/// Plain leapfrog with ten million steps over one period, returning the time
/// of the first downward velocity sign change located linearly.
fn brute_force_period(g: impl Fn(f64) -> f64, x0: f64, t_guess: f64) -> f64 {
    let n = 10_000_000usize;
    let dt = 1.5 * t_guess / n as f64;
    let (mut x, mut v) = (x0, 0.0);
    let mut seen_negative = false;
    for i in 0..n {
        let v_half = v - 0.5 * dt * g(x);
        x += dt * v_half;
        let v_new = v_half - 0.5 * dt * g(x);
        if v_new < 0.0 && !seen_negative {
            seen_negative = true;
        }
        if seen_negative && v > 0.0 && v_new <= 0.0 {
            return (i as f64 + v / (v - v_new)) * dt;
        }
        v = v_new;
    }
    panic!("no return");
}

#[test]
fn control_period_against_brute_force() {
    let pot = presets::potential("quartic_control").unwrap();
    let e = 0.3;
    let (_, xp) = turning_points(&pot, e).unwrap();
    let oracle = brute_force_period(|x| x + 4.0 * x.powi(3), xp, pot.target_period());
    let q = period(&pot, e).unwrap();
    let m = period_return_map(&pot, e).unwrap();
    assert!((q - oracle).abs() <= 1e-6, "{q} vs {oracle}");
    assert!((m - oracle).abs() <= 1e-6, "{m} vs {oracle}");
}

#[test]
fn potential_round_trip() {
    for h in catalog_examples().into_iter().filter(|h| h.is_smooth()) {
        for omega in [1.0, 3.0] {
            let pot = potential_from_involution(&h, omega).unwrap();
            let back = involution_from_potential(&pot).unwrap();
            let j = back.domain().intersect(&h.domain()).unwrap();
            for x in j.sample_interior(200) {
                let want = h.eval(x).unwrap();
                let got = back.eval(x).unwrap();
                assert!(
                    (got - want).abs() <= 1e-7 * (1.0 + want.abs()),
                    "{} ω={omega} at {x}: {got} vs {want}",
                    h.name()
                );
            }
        }
    }
}

#[test]
fn omega_recovered_by_finite_differences() {
    for (name, params) in [("rational", vec![2.0]), ("log_exp", vec![]), ("parabolic", vec![])] {
        for omega in [0.5, 1.0, 2.0] {
            let pot = potential_from_involution(&catalog(name, &params).unwrap(), omega).unwrap();
            let v2 = derivative9(&|x| pot.v().call(x), 0.0, 2, 1e-2);
            assert!(
                (v2.sqrt() - omega).abs() <= 1e-5 * omega,
                "{name}: {} vs {omega}",
                v2.sqrt()
            );
        }
    }
}

#[test]
fn isochrony_over_two_decades() {
    let pot = potential_from_involution(&catalog("rational", &[-1.0]).unwrap(), 1.5).unwrap();
    let grid = energy_grid(&pot, 6).unwrap();
    assert!(grid[grid.len() - 1] / grid[0] >= 100.0);
    let serial = verify_isochrony(&pot, &grid, 1e-6 * pot.target_period(), false).unwrap();
    let parallel = verify_isochrony(&pot, &grid, 1e-6 * pot.target_period(), true).unwrap();
    assert!(serial.passed);
    assert_eq!(serial.periods, parallel.periods);
    assert_eq!(serial.return_map_periods, parallel.return_map_periods);
}
