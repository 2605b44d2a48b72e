use involutions::centralforce::{
    simulate, simulate_many, stability_condition, stability_residual, stability_samples, CentralForceSystem,
    SimulationConfig, State4,
};
use involutions::{presets, Error, Interval, RealFunction};

#[test]
fn harmonic_orbit_matches_cosine() {
    let sys = presets::force("constant", &[]).unwrap();
    let s0 = State4::new(0.3, 0.1, -0.2, 0.4);
    let traj = simulate(&sys, s0, 20.0, 0.25, SimulationConfig::default()).unwrap();
    for s in &traj.samples {
        let (c, sn) = (s.t.cos(), s.t.sin());
        assert!((s.x - (0.3 * c + 0.1 * sn)).abs() <= 1e-8, "t = {}", s.t);
        assert!((s.y - (-0.2 * c + 0.4 * sn)).abs() <= 1e-8, "t = {}", s.t);
    }
}

#[test]
fn quartic_residual_at_one() {
    // V(1) = 3/4 and h(1) = −1: ρ = 4/3 − 2
    let sys = presets::force("one_plus_x2", &[]).unwrap();
    assert!((stability_residual(&sys, 1.0).unwrap() + 2.0 / 3.0).abs() <= 1e-9);
}

#[test]
fn rational_family_is_stable() {
    for a in [-1.0, 0.5, 1.0, 2.0] {
        let sys = presets::force("rational_cube", &[a]).unwrap();
        let r = stability_condition(&sys, &stability_samples(&sys, 64)).unwrap();
        assert!(r.stable, "a = {a}: {}", r.max_normalized);
        assert!(r.samples.len() >= 50);
    }
}

#[test]
fn quadrature_potential_agrees_with_closed_form() {
    let closed = presets::force("one_plus_x2", &[]).unwrap();
    let quad = CentralForceSystem::new("q", RealFunction::new(Interval::real(), |x| 1.0 + x * x), None).unwrap();
    for x in [-1.5, -0.2, 0.7, 2.0] {
        let a = closed.potential().v().eval(x).unwrap();
        let b = quad.potential().v().eval(x).unwrap();
        assert!((a - b).abs() <= 1e-11 * (1.0 + a), "{x}: {a} vs {b}");
    }
}

#[test]
fn start_outside_domain_is_rejected() {
    let sys = presets::force("rational_cube", &[1.0]).unwrap();
    let r = simulate(
        &sys,
        State4::new(-3.0, 0.0, 0.0, 0.0),
        5.0,
        0.1,
        SimulationConfig::default(),
    );
    assert!(matches!(r, Err(Error::OutsideDomain { .. })));
}

#[test]
fn unbounded_orbit_keeps_invariants() {
    // V tends to 2 as x grows, so energy 12.5 escapes to the right
    let sys = presets::force("rational_cube", &[1.0]).unwrap();
    let traj = simulate(
        &sys,
        State4::new(0.0, -5.0, 0.0, 0.0),
        5.0,
        0.1,
        SimulationConfig::default(),
    )
    .unwrap();
    assert!(traj.samples.last().unwrap().x > 15.0);
    assert!(traj.energy_drift <= 1e-8 * traj.initial_energy);
}

#[test]
fn parallel_runs_keep_order() {
    let sys = presets::force("one_plus_x2", &[]).unwrap();
    let starts: Vec<State4> = (1..=4).map(|i| State4::new(0.1 * i as f64, 0.0, 0.0, 0.3)).collect();
    let cfg = SimulationConfig::default();
    let a = simulate_many(&sys, &starts, 3.0, 0.5, cfg, false);
    let b = simulate_many(&sys, &starts, 3.0, 0.5, cfg, true);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.as_ref().unwrap().samples, y.as_ref().unwrap().samples);
    }
}
