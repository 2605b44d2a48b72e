//! Deterministic end-to-end checks over every module, as run by the CLI
//! `suite` command.

use serde::Serialize;

use crate::centralforce::{
    figure5_experiment, stability_condition, stability_residual, stability_samples, SimulationConfig, STABILITY_SAMPLES,
};
use crate::construct::{even_from_involution, from_even_function, from_symmetric_equation};
use crate::error::Result;
use crate::fde::{closed_form, residual_check, solve_numeric, FdeConfig, FdeProblem};
use crate::interval::Interval;
use crate::involution::{catalog, catalog_examples};
use crate::isochrony::{energy_grid, necessary_conditions, potential_from_involution, verify_isochrony, Potential};
use crate::presets;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckFn = fn(bool) -> Result<(bool, String)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("catalog", catalog_check),
    ("even_y2_over_8", parabola_check),
    ("even_y6", sextic_check),
    ("recovered_even", recovered_check),
    ("round_trips", round_trip_check),
    ("implicit_cubic", implicit_check),
    ("isochrony", isochrony_check),
    ("necessary_conditions", necessary_check),
    ("central_force", central_force_check),
    ("fde", fde_check),
];

/// Runs every check; with `parallel` the checks run on separate threads.
/// Results keep a fixed order either way.
pub fn run_suite(parallel: bool) -> Vec<Check> {
    let run = |&(name, f): &(&'static str, CheckFn)| match f(parallel) {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    };
    if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = CHECKS.iter().map(|c| s.spawn(move || run(c))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("suite worker panicked"))
                .collect()
        })
    } else {
        CHECKS.iter().map(run).collect()
    }
}

fn uniform(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |i| lo + (hi - lo) * i as f64 / (n + 1) as f64)
}

fn catalog_check(_: bool) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for h in catalog_examples() {
        let r = h.verify(401)?;
        ok &= r.passed;
        worst = worst.max(r.worst_ratio);
    }
    Ok((ok, format!("worst residual/tolerance {worst:.2e}")))
}

fn parabola_check(_: bool) -> Result<(bool, String)> {
    let c = from_even_function(&presets::even("y2_over_8", &[])?)?;
    let exact = |x: f64| x + 4.0 - 4.0 * (1.0 + x).sqrt();
    let mut worst: f64 = 0.0;
    for x in uniform(-1.0, 3.0, 500) {
        worst = worst.max((c.h.eval(x)? - exact(x)).abs());
    }
    let ends = (c.j.lo() + 1.0).abs().max((c.j.hi() - 3.0).abs());
    Ok((
        c.i == Interval::symmetric(4.0)? && ends <= 1e-12 && worst <= 1e-8,
        format!("J = {}, max error {worst:.2e}", c.j),
    ))
}

fn sextic_check(_: bool) -> Result<(bool, String)> {
    let c = from_even_function(&presets::even("y6", &[])?)?;
    let s = 12.0 * 6f64.powf(0.2);
    let err = (c.j.lo() + 5.0 / s).abs().max((c.j.hi() - 7.0 / s).abs());
    Ok((err <= 1e-10, format!("J = {}, endpoint error {err:.2e}", c.j)))
}

fn recovered_check(_: bool) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for lambda in [0.5, 2.0, 3.0] {
        let p = even_from_involution(&catalog("piecewise_linear", &[lambda])?)?;
        let c = (1.0 - lambda) / (1.0 + lambda);
        for y in p.domain().sample_interior(400) {
            worst = worst.max((p.eval(y)? - c * y.abs()).abs());
        }
    }
    let p = even_from_involution(&catalog("log_exp", &[])?)?;
    for y in p.domain().sample_interior(400) {
        worst = worst.max((p.eval(y)? + 2.0 * presets::ln_cosh(0.5 * y)).abs());
    }
    Ok((worst <= 1e-8, format!("max error {worst:.2e}")))
}

fn round_trip_check(_: bool) -> Result<(bool, String)> {
    let mut worst_a: f64 = 0.0;
    for h in catalog_examples() {
        let c = from_even_function(&even_from_involution(&h)?)?;
        for x in h.domain().intersect(&c.j)?.sample_interior(200) {
            let want = h.eval(x)?;
            worst_a = worst_a.max((c.h.eval(x)? - want).abs() / (1.0 + want.abs()));
        }
    }
    let mut worst_b: f64 = 0.0;
    for name in presets::EVEN_NAMES {
        let p = presets::even(name, &[2.0])?;
        let c = from_even_function(&p)?;
        let q = even_from_involution(&c.h)?;
        for y in c.i.intersect(&q.domain())?.sample_interior(200) {
            let want = p.eval(y)?;
            worst_b = worst_b.max((q.eval(y)? - want).abs() / (1.0 + want.abs()));
        }
    }
    Ok((
        worst_a <= 1e-7 && worst_b <= 1e-7,
        format!("A {worst_a:.2e}, B {worst_b:.2e}"),
    ))
}

fn implicit_check(_: bool) -> Result<(bool, String)> {
    let preset = presets::equation("cubic2")?;
    let t = from_symmetric_equation(&preset.equation, &preset.grid(2001))?;
    let exact = |x: f64| (2.0 - (x + 1.0).powi(3)).cbrt() - 1.0;
    let worst = t.table.iter().map(|&(x, y)| (y - exact(x)).abs()).fold(0.0, f64::max);
    let verified = t.involution.verify(401)?.passed;
    Ok((
        worst <= 1e-8 && verified,
        format!("max error {worst:.2e}, involution check {verified}"),
    ))
}

fn isochronous_potentials() -> Result<Vec<Potential>> {
    let specs: [(&str, &[f64]); 6] = [
        ("negation", &[]),
        ("rational", &[1.0]),
        ("rational", &[-1.0]),
        ("rational", &[2.0]),
        ("parabolic", &[]),
        ("log_exp", &[]),
    ];
    let mut out = Vec::new();
    for (name, params) in specs {
        for omega in [1.0, 2.0] {
            out.push(potential_from_involution(&catalog(name, params)?, omega)?);
        }
    }
    Ok(out)
}

fn isochrony_check(parallel: bool) -> Result<(bool, String)> {
    let mut ok = true;
    let mut dev: f64 = 0.0;
    let mut gap: f64 = 0.0;
    for pot in isochronous_potentials()? {
        let r = verify_isochrony(&pot, &energy_grid(&pot, 5)?, 1e-6, parallel)?;
        ok &= r.passed;
        dev = dev.max(r.max_deviation);
        gap = gap.max(r.max_estimator_gap);
    }
    let control = presets::potential("quartic_control")?;
    let rc = verify_isochrony(&control, &energy_grid(&control, 5)?, 1e-6, parallel)?;
    gap = gap.max(rc.max_estimator_gap);
    Ok((
        ok && !rc.passed && gap <= 1e-6,
        format!(
            "deviation {dev:.2e}, control {:.2e}, estimator gap {gap:.2e}",
            rc.max_deviation
        ),
    ))
}

fn necessary_check(_: bool) -> Result<(bool, String)> {
    let (mut r4, mut r6): (f64, f64) = (0.0, 0.0);
    for pot in isochronous_potentials()? {
        let c = necessary_conditions(&pot, None)?;
        r4 = r4.max(c.r4_relative);
        r6 = r6.max(c.r6_relative);
    }
    let control = necessary_conditions(&presets::potential("quartic_control")?, None)?;
    Ok((
        r4 <= 1e-3 && r6 <= 1e-3 && (control.r4 - 24.0).abs() <= 1e-6,
        format!("r4 {r4:.2e}, r6 {r6:.2e}, control r4 {}", control.r4),
    ))
}

fn central_force_check(_: bool) -> Result<(bool, String)> {
    let mut ok = true;
    for (name, params) in [("constant", vec![]), ("rational_cube", vec![1.0])] {
        let sys = presets::force(name, &params)?;
        ok &= stability_condition(&sys, &stability_samples(&sys, STABILITY_SAMPLES))?.stable;
    }
    let quartic = presets::force("one_plus_x2", &[])?;
    let rho1 = stability_residual(&quartic, 1.0)?;
    ok &= !stability_condition(&quartic, &stability_samples(&quartic, STABILITY_SAMPLES))?.stable;
    ok &= (rho1.abs() - 2.0 / 3.0).abs() <= 1e-9;
    let fig = figure5_experiment(SimulationConfig::default())?;
    ok &= fig.momentum_drift <= 1e-8 && fig.energy_drift <= 1e-8 && fig.radius_grows;
    Ok((
        ok,
        format!(
            "ρ(1) = {rho1:.12}, drift L {:.1e}, E_x {:.1e}",
            fig.momentum_drift, fig.energy_drift
        ),
    ))
}

fn fde_check(_: bool) -> Result<(bool, String)> {
    let (mut err, mut res): (f64, f64) = (0.0, 0.0);
    for a in [2.0, 0.5, -0.5, 0.3, 0.0] {
        let sol = solve_numeric(&FdeProblem::new(a, 1.0, 0.0, 10.0)?, FdeConfig::default())?;
        err = err.max(sol.closed_form_error(0.0, 10.0)?);
        res = res.max(residual_check(&sol, a)?);
    }
    let mut cont: f64 = 0.0;
    for t in uniform(-0.9, 10.0, 200) {
        let mid = closed_form(0.5, 1.0, t)?;
        for a in [0.5 - 1e-6, 0.5 + 1e-6] {
            cont = cont.max((closed_form(a, 1.0, t)? - mid).abs());
        }
    }
    Ok((
        err <= 1e-7 && res <= 1e-6 && cont <= 1e-4,
        format!("error {err:.2e}, residual {res:.2e}, continuity {cont:.2e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_checks_pass() {
        for f in [parabola_check, sextic_check, implicit_check, fde_check] {
            let (ok, detail) = f(false).unwrap();
            assert!(ok, "{detail}");
        }
    }
}
