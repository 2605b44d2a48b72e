use involutions::construct::{
    even_from_involution, from_even_function, from_symmetric_equation, invert_monotone, Continuity, EvenFunction,
};
use involutions::involution::catalog;
use involutions::{presets, Interval, RealFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn k_sextic(y: f64) -> f64 {
    0.5 * (y + y.powi(6))
}

/// Inverse of an increasing `k` by table lookup on a 10⁶ grid, then bisection.
fn dense_inverse(k: fn(f64) -> f64, lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    let n = 1_000_000;
    let ys: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let ks: Vec<f64> = ys.iter().map(|&y| k(y)).collect();
    move |x| {
        let i = ks.partition_point(|&v| v < x).clamp(1, n);
        let (mut a, mut b) = (ys[i - 1], ys[i]);
        while b - a > 4.0 * f64::EPSILON * (1.0 + a.abs()) {
            let m = 0.5 * (a + b);
            if k(m) < x {
                a = m
            } else {
                b = m
            }
        }
        0.5 * (a + b)
    }
}

#[test]
fn inversion_matches_dense_grid() {
    let r = 6f64.powf(-0.2) * (1.0 - 1e-9);
    let oracle = dense_inverse(k_sextic, -r, r);
    let k = RealFunction::new(Interval::symmetric(r).unwrap(), k_sextic)
        .with_derivative(|y: f64| 0.5 * (1.0 + 6.0 * y.powi(5)));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let x = rng.gen_range(k_sextic(-r)..k_sextic(r));
        let y = invert_monotone(&k, x, k.domain(), 1e-14).unwrap();
        assert!((y - oracle(x)).abs() <= 1e-10, "x = {x}");
    }
}

#[test]
fn displacement_identity() {
    for name in ["y2_over_8", "y6", "logcosh"] {
        let c = from_even_function(&presets::even(name, &[]).unwrap()).unwrap();
        for x in c.j.sample_interior(101) {
            let minus_k = -c.displacement.eval(x).unwrap();
            assert!(c.i.contains(minus_k), "{name}: {minus_k} not in {}", c.i);
            let back = c.half_sum.eval(minus_k).unwrap();
            let h = c.h.eval(x).unwrap();
            assert!(
                (back - h).abs() <= 1e-9 * (1.0 + h.abs()),
                "{name} at {x}: {back} vs {h}"
            );
        }
    }
}

#[test]
fn abs_lambda_gives_piecewise_linear() {
    for lambda in [0.25, 2.0, 5.0] {
        let c = from_even_function(&presets::even("abs_lambda", &[lambda]).unwrap()).unwrap();
        assert_eq!(c.j, Interval::real());
        for x in [-7.0, -1.0, -0.01, 0.3, 4.0] {
            let want = if x <= 0.0 { -x / lambda } else { -lambda * x };
            assert!((c.h.eval(x).unwrap() - want).abs() <= 1e-10 * (1.0 + want.abs()));
        }
    }
}

#[test]
fn non_monotone_k_is_truncated() {
    // K'(y) = (1 + P'(y))/2 with P = −y²: I = (−1/2, 1/2)
    let p = RealFunction::new(Interval::real(), |y| -y * y).with_derivative(|y| -2.0 * y);
    let c = from_even_function(&EvenFunction::new(p, Continuity::C1).unwrap()).unwrap();
    assert!((c.i.hi() - 0.5).abs() < 1e-12);
    assert!((c.j.lo() + 0.375).abs() < 1e-10 && (c.j.hi() - 0.125).abs() < 1e-10);
}

#[test]
fn implicit_presets_are_involutions() {
    for name in presets::EQUATION_NAMES {
        let preset = presets::equation(name).unwrap();
        let trace = from_symmetric_equation(&preset.equation, &preset.grid(801)).unwrap();
        assert!(trace.involution.verify(301).unwrap().passed, "{name}");
        for &(x, y) in &trace.table {
            assert!(preset.equation.eval(x, y).abs() <= 1e-10, "{name} at {x}");
        }
    }
}

#[test]
fn hyperbola_matches_rational() {
    let preset = presets::equation("hyperbola").unwrap();
    let trace = from_symmetric_equation(&preset.equation, &preset.grid(2001)).unwrap();
    let exact = catalog("rational", &[1.0]).unwrap();
    for &(x, y) in &trace.table {
        assert!((y - exact.eval(x).unwrap()).abs() <= 1e-10, "x = {x}");
    }
}

#[test]
fn recovered_even_function_of_parabolic() {
    let p = even_from_involution(&catalog("parabolic", &[]).unwrap()).unwrap();
    // square-root end: the limit resolves to about √ε
    assert!((p.domain().hi() - 4.0).abs() < 1e-7, "{}", p.domain());
    for y in [-3.5, -1.0, 0.2, 2.0, 3.9] {
        assert!((p.eval(y).unwrap() - y * y / 8.0).abs() < 1e-10);
    }
}
