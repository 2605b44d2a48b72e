use involutions::fde::{closed_form, deviating_argument, residual_check, solve_numeric, FdeConfig, FdeProblem, Regime};

/// The closed form satisfies the original equation, checked with centered
/// differences.
#[test]
fn closed_forms_solve_the_delay_equation() {
    for a in [-2.0, -0.5, -0.2, 0.0, 0.3, 0.5, 1.0, 3.0] {
        for t in [-0.8, -0.3, 0.4, 2.0, 9.0] {
            let s = 1e-5 * (1.0 + t);
            let d = (closed_form(a, 1.0, t + s).unwrap() - closed_form(a, 1.0, t - s).unwrap()) / (2.0 * s);
            let rhs = a * closed_form(a, 1.0, deviating_argument(t)).unwrap();
            assert!(
                (d - rhs).abs() <= 1e-6 * (1.0 + rhs.abs()),
                "a = {a}, t = {t}: {d} vs {rhs}"
            );
        }
    }
}

#[test]
fn deviating_argument_is_an_involution() {
    for t in [-0.99, -0.5, 0.0, 1.0, 100.0] {
        assert!((deviating_argument(deviating_argument(t)) - t).abs() <= 1e-12 * (1.0 + t.abs()));
    }
}

#[test]
fn numeric_matches_closed_form_in_every_regime() {
    for (a, regime) in [
        (-1.5, Regime::Oscillatory),
        (-0.5, Regime::CriticalNegative),
        (0.5, Regime::CriticalPositive),
        (0.3, Regime::Subcritical),
    ] {
        let p = FdeProblem::new(a, 2.0, -0.5, 10.0).unwrap();
        let sol = solve_numeric(&p, FdeConfig::default()).unwrap();
        assert_eq!(sol.regime, regime);
        assert!(sol.closed_form_error(-0.5, 10.0).unwrap() <= 1e-7, "a = {a}");
        assert!(residual_check(&sol, a).unwrap() <= 1e-6, "a = {a}");
    }
}

#[test]
fn critical_limit_is_continuous() {
    for t in [-0.9, 0.0, 1.0, 10.0] {
        for a0 in [-0.5, 0.5] {
            let mid = closed_form(a0, 1.0, t).unwrap();
            for eps in [-1e-6, 1e-6] {
                assert!((closed_form(a0 + eps, 1.0, t).unwrap() - mid).abs() <= 1e-4);
            }
        }
    }
}
