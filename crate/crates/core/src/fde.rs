//! The functional-differential equation `y'(t) = a·y(h(t))` with the
//! deviating argument `h(t) = −t/(1+t)`, an involution of `(−1, ∞)`.
//!
//! Differentiating once and using `h∘h = id` gives the Euler-type problem
//! `y'' = −a²/(1+t)²·y`, `y(0) = y₀`, `y'(0) = a·y₀`, which is integrated
//! numerically here and also solved in closed form in four regimes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::hermite;
use crate::ode::Dopri5;

/// Integration never goes below `−1 + SINGULARITY_GUARD`.
pub const SINGULARITY_GUARD: f64 = 1e-6;
/// Relative band around `|a| = 1/2` routed to the critical formulas.
pub const CRITICAL_BAND: f64 = 1e-12;

/// `h(t) = −t/(1+t)`.
pub fn deviating_argument(t: f64) -> f64 {
    -t / (1.0 + t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `|a| > 1/2`.
    Oscillatory,
    /// `a = 1/2`.
    CriticalPositive,
    /// `a = −1/2`.
    CriticalNegative,
    /// `|a| < 1/2`.
    Subcritical,
}

impl Regime {
    pub fn classify(a: f64) -> Self {
        let gap = a.abs() - 0.5;
        if gap.abs() <= CRITICAL_BAND * 0.5 {
            if a > 0.0 {
                Regime::CriticalPositive
            } else {
                Regime::CriticalNegative
            }
        } else if gap > 0.0 {
            Regime::Oscillatory
        } else {
            Regime::Subcritical
        }
    }
}

/// Exact solution of the reduced problem.
pub fn closed_form(a: f64, y0: f64, t: f64) -> Result<f64> {
    if !(t > -1.0) {
        return Err(Error::OutsideDomain {
            x: t,
            domain: crate::Interval::new(-1.0, f64::INFINITY)?,
        });
    }
    let s = (1.0 + t).ln();
    let root = (1.0 + t).sqrt();
    Ok(match Regime::classify(a) {
        Regime::CriticalPositive => y0 * root,
        Regime::CriticalNegative => y0 * root * (1.0 - s),
        Regime::Oscillatory => {
            let c = (4.0 * a * a - 1.0).sqrt() / 2.0;
            y0 * root * ((c * s).cos() + (2.0 * a - 1.0) / (2.0 * c) * (c * s).sin())
        }
        Regime::Subcritical => {
            let b = (1.0 - 4.0 * a * a).sqrt();
            y0 / (2.0 * b) * ((1.0 - b) / 2.0 * s).exp() * (b + 1.0 - 2.0 * a + (b - 1.0 + 2.0 * a) * (b * s).exp())
        }
    })
}

/// `y' = a·y(h(t)), y(0) = y0` on `[t0, t1]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FdeProblem {
    pub a: f64,
    pub y0: f64,
    pub t0: f64,
    pub t1: f64,
}

impl FdeProblem {
    pub fn new(a: f64, y0: f64, t0: f64, t1: f64) -> Result<Self> {
        if !(t0 > -1.0) || !(t1 > t0) || !t1.is_finite() || !a.is_finite() || !y0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need −1 < t0 < t1 < ∞, got [{t0}, {t1}]"
            )));
        }
        Ok(Self { a, y0, t0, t1 })
    }

    /// Smallest interval holding `[t0, t1]`, its image under `h`, and 0.
    pub fn hull(&self) -> (f64, f64) {
        let lo = self.t0.min(deviating_argument(self.t1)).min(0.0);
        let hi = self.t1.max(deviating_argument(self.t0)).max(0.0);
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FdeConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Largest output spacing; below 0 the spacing also shrinks with `1 + t`.
    pub dt: f64,
}

impl Default for FdeConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            dt: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FdeSolution {
    pub problem: FdeProblem,
    pub regime: Regime,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

impl FdeSolution {
    /// Grid range actually integrated.
    pub fn covered(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    /// `(y, y')` at `t` by cubic Hermite interpolation of the grid.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.covered();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutsideDomain {
                x: t,
                domain: crate::Interval::new(lo, hi)?,
            });
        }
        let i = match self.t.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => return Ok((self.y[i], self.dy[i])),
            Err(i) => i - 1,
        };
        let a2 = self.problem.a * self.problem.a;
        let acc = |k: usize| -a2 / (1.0 + self.t[k]).powi(2) * self.y[k];
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let y = hermite(t0, self.y[i], self.dy[i], t1, self.y[i + 1], self.dy[i + 1], t);
        let dy = hermite(t0, self.dy[i], acc(i), t1, self.dy[i + 1], acc(i + 1), t);
        Ok((y, dy))
    }

    /// Grid points inside the requested span.
    pub fn span_points(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (t0, t1) = (self.problem.t0, self.problem.t1);
        self.t
            .iter()
            .copied()
            .enumerate()
            .filter(move |&(_, t)| t >= t0 && t <= t1)
    }

    /// Largest `|y − closed_form|` over grid points of `[lo, hi]`.
    pub fn closed_form_error(&self, lo: f64, hi: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, &t) in self.t.iter().enumerate() {
            if t >= lo && t <= hi {
                let exact = closed_form(self.problem.a, self.problem.y0, t)?;
                worst = worst.max((self.y[i] - exact).abs());
            }
        }
        Ok(worst)
    }
}

fn integrate_side(p: &FdeProblem, cfg: &FdeConfig, end: f64) -> Result<Vec<(f64, f64, f64)>> {
    let a2 = p.a * p.a;
    let rhs = move |t: f64, s: &[f64; 2]| [s[1], -a2 / ((1.0 + t) * (1.0 + t)) * s[0]];
    let mut solver = Dopri5::new(rhs, 0.0, [p.y0, p.a * p.y0], cfg.rtol, cfg.atol);
    let mut out = Vec::new();
    let mut t = 0.0;
    let forward = end > 0.0;
    while t != end {
        let next = if forward {
            (t + cfg.dt).min(end)
        } else {
            (t - cfg.dt.min(0.01 * (1.0 + t))).max(end)
        };
        let y = solver.advance_to(next).map_err(|_| Error::Singular(solver.t()))?;
        t = next;
        out.push((t, y[0], y[1]));
    }
    Ok(out)
}

/// Integrates the reduced problem from 0 in both directions over the hull
/// of the span and its image under `h`.
pub fn solve_numeric(p: &FdeProblem, cfg: FdeConfig) -> Result<FdeSolution> {
    let guard = -1.0 + SINGULARITY_GUARD;
    if p.t0 < guard {
        return Err(Error::Singular(guard));
    }
    let (lo, hi) = p.hull();
    let lo = lo.max(guard);
    let mut rows = vec![(0.0, p.y0, p.a * p.y0)];
    if hi > 0.0 {
        rows.extend(integrate_side(p, &cfg, hi)?);
    }
    if lo < 0.0 {
        let mut back = integrate_side(p, &cfg, lo)?;
        back.reverse();
        back.extend(rows);
        rows = back;
    }
    Ok(FdeSolution {
        problem: *p,
        regime: Regime::classify(p.a),
        t: rows.iter().map(|r| r.0).collect(),
        y: rows.iter().map(|r| r.1).collect(),
        dy: rows.iter().map(|r| r.2).collect(),
    })
}

/// Largest `|y'(t) − a·y(h(t))|` over the grid points of the span.
pub fn residual_check(sol: &FdeSolution, a: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, t) in sol.span_points() {
        let (yh, _) = sol.eval(deviating_argument(t))?;
        worst = worst.max((sol.dy[i] - a * yh).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_values() {
        assert_eq!(closed_form(0.5, 1.0, 3.0).unwrap(), 2.0);
        assert!(closed_form(-0.5, 1.0, std::f64::consts::E - 1.0).unwrap().abs() < 1e-15);
        for t in [-0.5, 0.0, 4.0] {
            assert!((closed_form(0.0, 3.0, t).unwrap() - 3.0).abs() < 1e-14);
        }
        assert!(closed_form(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn initial_slope_is_a_y0() {
        for a in [2.0, 0.3, -0.5, 0.5, -1.5] {
            let s = 1e-5;
            let d = (closed_form(a, 1.0, s).unwrap() - closed_form(a, 1.0, -s).unwrap()) / (2.0 * s);
            assert!((d - a).abs() < 1e-6, "a = {a}: {d}");
            assert!((closed_form(a, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn classification() {
        assert_eq!(Regime::classify(0.5), Regime::CriticalPositive);
        assert_eq!(Regime::classify(-0.5), Regime::CriticalNegative);
        assert_eq!(Regime::classify(0.5 + 1e-14), Regime::CriticalPositive);
        assert_eq!(Regime::classify(0.5 + 1e-6), Regime::Oscillatory);
        assert_eq!(Regime::classify(0.0), Regime::Subcritical);
    }

    #[test]
    fn hull_covers_image() {
        let p = FdeProblem::new(2.0, 1.0, 0.0, 10.0).unwrap();
        let (lo, hi) = p.hull();
        assert!((lo + 10.0 / 11.0).abs() < 1e-15 && hi == 10.0);
    }

    #[test]
    fn numeric_matches_oscillatory() {
        let p = FdeProblem::new(2.0, 1.0, 0.0, 10.0).unwrap();
        let sol = solve_numeric(&p, FdeConfig::default()).unwrap();
        assert_eq!(sol.y[sol.t.iter().position(|&t| t == 0.0).unwrap()], 1.0);
        assert!(sol.closed_form_error(0.0, 10.0).unwrap() < 1e-7);
        assert!(residual_check(&sol, 2.0).unwrap() < 1e-6);
    }

    #[test]
    fn span_too_close_to_singularity() {
        let p = FdeProblem::new(1.0, 1.0, -1.0 + 1e-9, 1.0).unwrap();
        assert!(matches!(
            solve_numeric(&p, FdeConfig::default()),
            Err(Error::Singular(_))
        ));
    }
}
