//! Named even functions, symmetric equations, forces and potentials.

use crate::centralforce::CentralForceSystem;
use crate::construct::{Continuity, EvenFunction, SymmetricEquation};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::interval::Interval;
use crate::isochrony::Potential;

pub const EVEN_NAMES: &[&str] = &["zero", "y2_over_8", "y6", "abs_lambda", "logcosh"];
pub const EQUATION_NAMES: &[&str] = &["linear", "hyperbola", "cubic2"];
pub const FORCE_NAMES: &[&str] = &["constant", "one_plus_x2", "rational_cube"];
pub const POTENTIAL_NAMES: &[&str] = &["harmonic", "quartic_control"];

fn param(name: &str, params: &[f64], i: usize, what: &str) -> Result<f64> {
    params
        .get(i)
        .copied()
        .ok_or_else(|| Error::InvalidParameter(format!("`{name}` needs parameter {what}")))
}

/// `ln cosh u` without overflow.
pub fn ln_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Accepts `y^2/8` and `y^6` as aliases of `y2_over_8` and `y6`.
pub fn even(name: &str, params: &[f64]) -> Result<EvenFunction> {
    let real = Interval::real();
    match name {
        "zero" | "0" => EvenFunction::new(
            RealFunction::new(real, |_| 0.0).with_derivative(|_| 0.0),
            Continuity::C1,
        ),
        "y2_over_8" | "y^2/8" => EvenFunction::new(
            RealFunction::new(real, |y| y * y / 8.0).with_derivative(|y| y / 4.0),
            Continuity::C1,
        ),
        "y6" | "y^6" => EvenFunction::new(
            RealFunction::new(real, |y: f64| y.powi(6)).with_derivative(|y: f64| 6.0 * y.powi(5)),
            Continuity::C1,
        ),
        "abs_lambda" => {
            let lambda = param(name, params, 0, "lambda")?;
            if !(lambda > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "lambda must be positive, got {lambda}"
                )));
            }
            let c = (1.0 - lambda) / (1.0 + lambda);
            let p = RealFunction::new(real, move |y: f64| c * y.abs())
                .with_derivative(move |y: f64| if y == 0.0 { 0.0 } else { c * y.signum() })
                .with_kinks(vec![0.0]);
            EvenFunction::new(p, Continuity::C0)
        }
        "logcosh" => EvenFunction::new(
            RealFunction::new(real, |y| -2.0 * ln_cosh(0.5 * y)).with_derivative(|y: f64| -(0.5 * y).tanh()),
            Continuity::C1,
        ),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

/// A symmetric equation with the default `x` range to trace it on.
pub struct EquationPreset {
    pub equation: SymmetricEquation,
    pub grid_range: (f64, f64),
}

impl EquationPreset {
    /// `n` evenly spaced points of the grid range, plus 0.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.grid_range;
        let n = n.max(3);
        let mut g: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        g.push(0.0);
        g.sort_by(f64::total_cmp);
        g.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        g
    }
}

pub fn equation(name: &str) -> Result<EquationPreset> {
    match name {
        "linear" => Ok(EquationPreset {
            equation: SymmetricEquation::new(Interval::real(), |x, y| x + y)?.with_partial(|_, _| 1.0),
            grid_range: (-2.0, 2.0),
        }),
        "hyperbola" => Ok(EquationPreset {
            equation: SymmetricEquation::new(Interval::new(-1.0, f64::INFINITY)?, |x, y| x + y + x * y)?
                .with_partial(|x, _| 1.0 + x),
            grid_range: (-0.9, 9.0),
        }),
        "cubic2" => {
            let c = 2f64.cbrt() - 1.0;
            Ok(EquationPreset {
                equation: SymmetricEquation::new(Interval::new(-1.0, c)?, |x: f64, y: f64| {
                    (x + 1.0).powi(3) + (y + 1.0).powi(3) - 2.0
                })?
                .with_partial(|_, y: f64| 3.0 * (y + 1.0).powi(2)),
                grid_range: (-1.0 + 1e-3 * (1.0 + c), c - 1e-3 * (1.0 + c)),
            })
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}

/// Forces `f` with `f(0) = 1` and their closed-form potentials.
pub fn force(name: &str, params: &[f64]) -> Result<CentralForceSystem> {
    let real = Interval::real();
    match name {
        "constant" => CentralForceSystem::new(
            name,
            RealFunction::new(real, |_| 1.0),
            Some(RealFunction::new(real, |x| 0.5 * x * x).with_derivative(|x| x)),
        ),
        "one_plus_x2" => CentralForceSystem::new(
            name,
            RealFunction::new(real, |x| 1.0 + x * x),
            Some(
                RealFunction::new(real, |x: f64| 0.5 * x * x + 0.25 * x.powi(4))
                    .with_derivative(|x: f64| x + x.powi(3)),
            ),
        ),
        "rational_cube" => {
            let a = param(name, params, 0, "a")?;
            let domain = if a > 0.0 {
                Interval::new(-2.0 / a, f64::INFINITY)?
            } else if a < 0.0 {
                Interval::new(f64::NEG_INFINITY, -2.0 / a)?
            } else {
                real
            };
            CentralForceSystem::new(
                name,
                RealFunction::new(domain, move |x| 8.0 / (2.0 + a * x).powi(3)),
                Some(
                    RealFunction::new(domain, move |x| 2.0 * x * x / (2.0 + a * x).powi(2))
                        .with_derivative(move |x| 8.0 * x / (2.0 + a * x).powi(3)),
                ),
            )
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}

/// Test potentials that are not built from an involution.
pub fn potential(name: &str) -> Result<Potential> {
    let real = Interval::real();
    match name {
        "harmonic" => Potential::new(
            name,
            RealFunction::new(real, |x| 0.5 * x * x),
            RealFunction::new(real, |x| x),
            Some(1.0),
        )
        .map(|p| p.with_origin_derivatives([1.0, 0.0, 0.0, 0.0, 0.0])),
        "quartic_control" => Potential::new(
            name,
            RealFunction::new(real, |x: f64| 0.5 * x * x + x.powi(4)),
            RealFunction::new(real, |x: f64| x + 4.0 * x.powi(3)),
            Some(1.0),
        )
        .map(|p| p.with_origin_derivatives([1.0, 0.0, 24.0, 0.0, 0.0])),
        other => Err(Error::UnknownName(other.to_string())),
    }
}
