//! Isochronous potentials.
//!
//! An involution `h` and a frequency `ω` give the potential
//! `V(x) = ω²/8·(x − h(x))²`, all of whose orbits under `ẍ = −V'(x)` have
//! period `2π/ω`. Conversely a potential well pairs each `x` with the point
//! on the other side of 0 at the same height, which is an involution.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd;
use crate::function::{Limit, RealFunction};
use crate::interp::hermite;
use crate::interval::{Interval, Side};
use crate::involution::{verify_involution, Involution, Tolerance};
use crate::ode::verlet_step;
use crate::quadrature;
use crate::roots;

/// Tolerance of the period quadrature.
pub const PERIOD_TOL: f64 = 1e-10;
/// Leapfrog steps per expected period in the return-map estimator.
pub const RETURN_MAP_STEPS: usize = 4096;
/// Grid size used to certify that a potential is a well.
pub const WELL_SAMPLES: usize = 2001;

/// `V` with `g = V'` and the small-oscillation frequency `ω = √V''(0)`.
#[derive(Debug, Clone)]
pub struct Potential {
    name: String,
    v: RealFunction,
    g: RealFunction,
    omega: f64,
    origin_derivatives: Option<[f64; 5]>,
}

impl Potential {
    /// `omega = None` estimates `√V''(0)` by finite differences.
    pub fn new(name: impl Into<String>, v: RealFunction, g: RealFunction, omega: Option<f64>) -> Result<Self> {
        let j = v.domain();
        if !j.contains(0.0) {
            return Err(Error::OutsideDomain { x: 0.0, domain: j });
        }
        let v0 = v.eval(0.0)?;
        if v0.abs() > 1e-14 {
            return Err(Error::NonzeroAtOrigin(v0));
        }
        let omega = match omega {
            Some(w) if w > 0.0 && w.is_finite() => w,
            Some(w) => return Err(Error::InvalidParameter(format!("omega must be positive, got {w}"))),
            None => {
                let step = 1e-2 * j.scale();
                let v2 = fd::derivative9(&|x| v.call(x), 0.0, 2, step);
                if !(v2 > 0.0) {
                    return Err(Error::NotACenter(v2));
                }
                v2.sqrt()
            }
        };
        Ok(Self {
            name: name.into(),
            v,
            g,
            omega,
            origin_derivatives: None,
        })
    }

    /// Supplies `[V'', V''', V⁽⁴⁾, V⁽⁵⁾, V⁽⁶⁾]` at the origin.
    pub fn with_origin_derivatives(mut self, d: [f64; 5]) -> Self {
        self.origin_derivatives = Some(d);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn v(&self) -> &RealFunction {
        &self.v
    }

    pub fn g(&self) -> &RealFunction {
        &self.g
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn domain(&self) -> Interval {
        self.v.domain()
    }

    /// The period every orbit has if the potential is isochronous.
    pub fn target_period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn origin_derivatives(&self) -> Option<[f64; 5]> {
        self.origin_derivatives
    }
}

/// `V(x) = ω²/8·(x − h(x))²` and `g(x) = ω²/4·(x − h(x))·(1 − h'(x))`.
pub fn potential_from_involution(h: &Involution, omega: f64) -> Result<Potential> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let j = h.domain();
    let w2 = omega * omega;
    let hv = h.function().clone();
    let v = RealFunction::new(j, move |x| {
        let k = x - hv.call(x);
        0.125 * w2 * k * k
    });
    let hg = h.function().clone();
    let g = RealFunction::new(j, move |x| 0.25 * w2 * (x - hg.call(x)) * (1.0 - hg.derivative_at(x)))
        .with_kinks(h.kinks().to_vec());
    let g_for_v = g.clone();
    let v = v
        .with_derivative(move |x| g_for_v.call(x))
        .with_kinks(h.kinks().to_vec());
    Potential::new(format!("{}_potential", h.name()), v, g, Some(omega))
}

/// Region around 0 on which `V` is certified decreasing then increasing.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Well {
    pub region: Interval,
    /// Supremum of `V` over the left and right halves of `region`.
    pub left_sup: f64,
    pub right_sup: f64,
}

impl Well {
    /// Largest energy with turning points on both sides.
    pub fn max_energy(&self) -> f64 {
        self.left_sup.min(self.right_sup)
    }
}

/// Certifies the well on a sample grid of the domain; the region stops at
/// the first sample where `V` fails to rise moving away from 0.
pub fn certify_well(pot: &Potential) -> Result<Well> {
    let v = pot.v();
    let j = pot.domain();
    let grid = j.sample_interior(WELL_SAMPLES);
    let mut bounds = [j.lo(), j.hi()];
    let mut sups = [0.0; 2];
    for (idx, side) in [Side::Lo, Side::Hi].into_iter().enumerate() {
        let pts: Vec<f64> = match side {
            Side::Lo => grid.iter().rev().copied().filter(|&x| x < 0.0).collect(),
            Side::Hi => grid.iter().copied().filter(|&x| x > 0.0).collect(),
        };
        let mut last = (0.0, 0.0);
        let mut cut = false;
        for &x in &pts {
            let val = v.call(x);
            if !(val > last.1) {
                cut = true;
                break;
            }
            last = (x, val);
        }
        if cut {
            if last.0 == 0.0 {
                return Err(Error::NotACenter(0.0));
            }
            bounds[idx] = last.0;
            sups[idx] = last.1;
        } else {
            sups[idx] = match v.limit(side) {
                Limit::Finite(s) => s.max(last.1),
                Limit::PosInfinity => f64::INFINITY,
                Limit::NegInfinity => last.1,
            };
        }
    }
    Ok(Well {
        region: Interval::new(bounds[0], bounds[1])?,
        left_sup: sups[0],
        right_sup: sups[1],
    })
}

/// Point on `side` of 0 inside `region` where `V = e`; with `clamp`, the
/// closest sampled point to the region end when `e` is out of reach.
fn level_point(v: &RealFunction, region: Interval, e: f64, side: Side, clamp: bool) -> Result<f64> {
    if e <= 0.0 {
        return Ok(0.0);
    }
    let half = match side {
        Side::Lo => Interval::new(region.lo(), 0.0)?,
        Side::Hi => Interval::new(0.0, region.hi())?,
    };
    let mut prev = 0.0;
    let mut hit = None;
    let pts = if half.end(side).is_finite() {
        half.approach(0.0, side, 1100)
    } else {
        let s = region.scale();
        let sign = if side == Side::Lo { -1.0 } else { 1.0 };
        (-20..1100)
            .map(|k| sign * s * 2f64.powi(k))
            .take_while(|x| x.is_finite())
            .collect()
    };
    for p in pts {
        let val = v.call(p);
        if val >= e {
            hit = Some(p);
            break;
        }
        prev = p;
    }
    match hit {
        Some(p) => Ok(roots::bisect(|x| v.call(x) - e, prev, p)),
        None if clamp && prev != 0.0 => Ok(prev),
        None => Err(Error::EnergyTooLarge {
            energy: e,
            bound: v.call(prev),
        }),
    }
}

/// Turning points `x₋ < 0 < x₊` with `V(x±) = E`.
pub fn turning_points(pot: &Potential, e: f64) -> Result<(f64, f64)> {
    let well = certify_well(pot)?;
    turning_points_in(pot, &well, e)
}

fn turning_points_in(pot: &Potential, well: &Well, e: f64) -> Result<(f64, f64)> {
    if !(e > 0.0) {
        return Err(Error::InvalidParameter(format!("energy must be positive, got {e}")));
    }
    if e >= well.max_energy() {
        return Err(Error::EnergyTooLarge {
            energy: e,
            bound: well.max_energy(),
        });
    }
    let lo = level_point(pot.v(), well.region, e, Side::Lo, false)?;
    let hi = level_point(pot.v(), well.region, e, Side::Hi, false)?;
    Ok((lo, hi))
}

/// Level pairing: `h(x)` is the point across 0 with `V(h(x)) = V(x)`.
///
/// The result lives on the paired well, the part of the certified well
/// below the lower of its two rims.
pub fn involution_from_potential(pot: &Potential) -> Result<Involution> {
    let well = certify_well(pot)?;
    let e_star = well.max_energy();
    let v = pot.v().clone();
    let mut region = well.region;
    if e_star.is_finite() {
        let rel = (well.left_sup - well.right_sup).abs() / e_star;
        if rel > 1e-9 {
            let (lo, hi) = if well.left_sup > well.right_sup {
                (level_point(&v, region, e_star, Side::Lo, true)?, region.hi())
            } else {
                (region.lo(), level_point(&v, region, e_star, Side::Hi, true)?)
            };
            region = Interval::new(lo, hi)?;
        }
    }
    let vv = v.clone();
    let map = move |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        let side = if x > 0.0 { Side::Lo } else { Side::Hi };
        level_point(&vv, region, vv.call(x), side, true).unwrap_or(f64::NAN)
    };
    let g = pot.g().clone();
    let map = Arc::new(map);
    let m2 = Arc::clone(&map);
    let h = RealFunction::new(region, move |x| map(x)).with_derivative(move |x| {
        if x == 0.0 {
            return -1.0;
        }
        g.call(x) / g.call(m2(x))
    });
    let inv = Involution::from_parts(format!("{}_pairing", pot.name()), vec![], h, 0.0, true);
    let report = verify_involution(inv.function(), region, 201, Tolerance::default())?;
    if !report.passed {
        return Err(Error::Verification(format!(
            "level pairing is not an involution: worst ratio {} at {}",
            report.worst_ratio, report.worst_x
        )));
    }
    Ok(inv)
}

/// `T(E) = √2·∫ dx/√(E − V(x))` between the turning points, integrated in
/// `θ` with `x = x₋ + (x₊ − x₋)·sin²θ` so the integrand stays bounded.
pub fn period(pot: &Potential, e: f64) -> Result<f64> {
    let well = certify_well(pot)?;
    period_in(pot, &well, e)
}

fn period_in(pot: &Potential, well: &Well, e: f64) -> Result<f64> {
    let (lo, hi) = turning_points_in(pot, well, e)?;
    period_between(pot, e, lo, hi)
}

fn period_between(pot: &Potential, e: f64, lo: f64, hi: f64) -> Result<f64> {
    let span = hi - lo;
    let v = pot.v();
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let x = lo + span * s * s;
        let gap = e - v.call(x);
        if gap <= 0.0 {
            return 0.0;
        }
        2.0 * span * s * c / gap.sqrt()
    };
    let r = quadrature::integrate(integrand, 0.0, 0.5 * PI, PERIOD_TOL, PERIOD_TOL)?;
    Ok(2f64.sqrt() * r.value)
}

/// Period from the leapfrog return map: start at rest at `x₊`, step with
/// `T_guess/4096` until the velocity next turns from positive to negative,
/// locate that instant by cubic Hermite interpolation of the velocity, and
/// extrapolate the step-size error away using a second run at half the
/// step (the method is symmetric, so its error is even in the step).
pub fn period_return_map(pot: &Potential, e: f64) -> Result<f64> {
    let well = certify_well(pot)?;
    return_map_in(pot, &well, e)
}

fn return_map_in(pot: &Potential, well: &Well, e: f64) -> Result<f64> {
    let (_, hi) = turning_points_in(pot, well, e)?;
    let guess = pot.target_period();
    let coarse = leapfrog_return(pot, hi, guess / RETURN_MAP_STEPS as f64)?;
    let fine = leapfrog_return(pot, hi, guess / (2 * RETURN_MAP_STEPS) as f64)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn leapfrog_return(pot: &Potential, x0: f64, dt: f64) -> Result<f64> {
    let g = pot.g();
    let accel = |x: f64| -g.call(x);
    let (mut x, mut v) = (x0, 0.0);
    let mut a = accel(x);
    let mut t = 0.0;
    let mut seen_negative = false;
    let max_steps = 16 * RETURN_MAP_STEPS;
    for _ in 0..max_steps {
        let (x1, v1) = verlet_step(&accel, x, v, dt);
        let a1 = accel(x1);
        if !x1.is_finite() || !pot.domain().contains(x1) {
            return Err(Error::OutsideDomain {
                x: x1,
                domain: pot.domain(),
            });
        }
        if v1 < 0.0 && v < 0.0 {
            seen_negative = true;
        }
        if seen_negative && v > 0.0 && v1 <= 0.0 {
            let (t0, t1) = (t, t + dt);
            let tc = roots::bisect(|s| hermite(t0, v, a, t1, v1, a1, s), t0, t1);
            return Ok(tc);
        }
        x = x1;
        v = v1;
        a = a1;
        t += dt;
    }
    Err(Error::Verification(format!(
        "no return to the turning point within {} steps",
        max_steps
    )))
}

/// Outcome of [`verify_isochrony`].
#[derive(Debug, Clone, Serialize)]
pub struct PeriodReport {
    pub energies: Vec<f64>,
    pub periods: Vec<f64>,
    pub return_map_periods: Vec<f64>,
    pub target: f64,
    pub max_deviation: f64,
    /// Largest disagreement between the two period estimators.
    pub max_estimator_gap: f64,
    pub tol: f64,
    pub passed: bool,
}

/// `n` energies spaced geometrically from `1e-3·E_max` to `0.9·E_max`.
/// Without a finite rim, `E_max` is taken as `ω²/2`.
pub fn energy_grid(pot: &Potential, n: usize) -> Result<Vec<f64>> {
    let well = certify_well(pot)?;
    let e_max = well.max_energy();
    let e_max = if e_max.is_finite() {
        e_max
    } else {
        0.5 * pot.omega() * pot.omega()
    };
    let (a, b) = (1e-3 * e_max, 0.9 * e_max);
    if n == 1 {
        return Ok(vec![b]);
    }
    Ok((0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect())
}

/// Measures `T(E)` with both estimators at every energy; passes iff every
/// quadrature period lies within `tol` of `2π/ω`. With `parallel`, energies
/// are spread over threads and results keep the input order.
pub fn verify_isochrony(pot: &Potential, energies: &[f64], tol: f64, parallel: bool) -> Result<PeriodReport> {
    let well = certify_well(pot)?;
    let measure = |e: f64| -> Result<(f64, f64)> { Ok((period_in(pot, &well, e)?, return_map_in(pot, &well, e)?)) };
    let results: Vec<Result<(f64, f64)>> = if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = energies.iter().map(|&e| s.spawn(move || measure(e))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("period worker panicked"))
                .collect()
        })
    } else {
        energies.iter().map(|&e| measure(e)).collect()
    };
    let mut periods = Vec::with_capacity(energies.len());
    let mut return_map_periods = Vec::with_capacity(energies.len());
    for r in results {
        let (q, m) = r?;
        periods.push(q);
        return_map_periods.push(m);
    }
    let target = pot.target_period();
    let max_deviation = periods.iter().map(|t| (t - target).abs()).fold(0.0, f64::max);
    let max_estimator_gap = periods
        .iter()
        .zip(&return_map_periods)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(PeriodReport {
        energies: energies.to_vec(),
        periods,
        return_map_periods,
        target,
        max_deviation,
        max_estimator_gap,
        tol,
        passed: max_deviation <= tol,
    })
}

/// Derivatives at the origin and the residuals of the two conditions every
/// isochronous potential satisfies.
#[derive(Debug, Clone, Serialize)]
pub struct NecessaryConditions {
    /// `[V'', V''', V⁽⁴⁾, V⁽⁵⁾, V⁽⁶⁾]` at 0.
    pub derivatives: [f64; 5],
    /// `V⁽⁴⁾ − 5V'''²/(3V'')`.
    pub r4: f64,
    /// `V⁽⁶⁾ − 7V'''V⁽⁵⁾/V'' + 140V'''⁴/(9V''³)`.
    pub r6: f64,
    /// `|r4|` over the size of its terms plus `V''/ℓ²`.
    pub r4_relative: f64,
    /// `|r6|` over the size of its terms plus `V''/ℓ⁴`.
    pub r6_relative: f64,
    pub length_scale: f64,
    pub analytic: bool,
}

/// Evaluates the conditions with supplied origin derivatives when present,
/// otherwise with extrapolated 9-point central differences of `V` with
/// spacing `fd_step` (default `1e-2` times the domain scale).
///
/// The relative residuals add `V''/ℓ^k` to the denominators, `ℓ` the domain
/// scale, so potentials whose higher derivatives all vanish are judged
/// against the natural size of those derivatives rather than against zero.
pub fn necessary_conditions(pot: &Potential, fd_step: Option<f64>) -> Result<NecessaryConditions> {
    let ell = pot.domain().scale();
    let (d, analytic) = match pot.origin_derivatives() {
        Some(d) => (d, true),
        None => {
            let step = fd_step.unwrap_or(1e-2 * ell);
            if !(step > 0.0) {
                return Err(Error::InvalidParameter(format!("fd_step must be positive, got {step}")));
            }
            let v = pot.v();
            let f = |x: f64| v.call(x);
            let mut d = [0.0; 5];
            for (i, m) in (2..=6).enumerate() {
                d[i] = fd::derivative9(&f, 0.0, m, step);
            }
            (d, false)
        }
    };
    let [v2, v3, v4, v5, v6] = d;
    if !(v2 > 0.0) {
        return Err(Error::NotACenter(v2));
    }
    let t4 = 5.0 * v3 * v3 / (3.0 * v2);
    let r4 = v4 - t4;
    let t6a = 7.0 * v3 * v5 / v2;
    let t6b = 140.0 * v3.powi(4) / (9.0 * v2.powi(3));
    let r6 = v6 - t6a + t6b;
    let r4_relative = r4.abs() / (v4.abs() + t4.abs() + v2 / (ell * ell));
    let r6_relative = r6.abs() / (v6.abs() + t6a.abs() + t6b.abs() + v2 / ell.powi(4));
    Ok(NecessaryConditions {
        derivatives: d,
        r4,
        r6,
        r4_relative,
        r6_relative,
        length_scale: ell,
        analytic,
    })
}
