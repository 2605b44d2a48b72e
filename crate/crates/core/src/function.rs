//! Real functions with a declared open domain.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::{Interval, Side};

pub type Map = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A map `ℝ → ℝ` restricted to an open interval, with an optional analytic
/// derivative and a list of points where it is not differentiable.
#[derive(Clone)]
pub struct RealFunction {
    map: Map,
    derivative: Option<Map>,
    domain: Interval,
    kinks: Vec<f64>,
}

impl RealFunction {
    pub fn new<F>(domain: Interval, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            map: Arc::new(f),
            derivative: None,
            domain,
            kinks: Vec::new(),
        }
    }

    pub fn with_derivative<D>(mut self, d: D) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub(crate) fn map(&self) -> Map {
        Arc::clone(&self.map)
    }

    pub(crate) fn derivative_map(&self) -> Option<Map> {
        self.derivative.clone()
    }

    /// Checked evaluation: rejects points outside the domain and
    /// non-finite results.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain { x, domain: self.domain });
        }
        let v = (self.map)(x);
        if v.is_nan() {
            return Err(Error::NonFinite { x });
        }
        Ok(v)
    }

    /// Unchecked evaluation, for inner loops that already control `x`.
    #[inline]
    pub fn call(&self, x: f64) -> f64 {
        (self.map)(x)
    }

    /// `f'(x)`: analytic when available, otherwise a centered difference with
    /// step `cbrt(ε)·(1+|x|)`, shrunk to stay inside the domain.
    pub fn derivative_at(&self, x: f64) -> f64 {
        if let Some(d) = &self.derivative {
            return d(x);
        }
        centered_difference(&*self.map, self.domain, x)
    }

    /// Same map on a smaller domain.
    pub fn restrict(&self, domain: Interval) -> Self {
        let mut out = self.clone();
        out.domain = domain;
        out.kinks.retain(|&k| domain.contains(k));
        out
    }

    /// One-sided limit at an end of the domain, along the geometric sequence
    /// of [`Interval::approach`].
    pub fn limit(&self, side: Side) -> Limit {
        let from = self.domain.center();
        let pts = self.domain.approach(from, side, 1100);
        one_sided_limit(pts.into_iter().map(|x| (self.map)(x)))
    }
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunction")
            .field("domain", &self.domain)
            .field("analytic_derivative", &self.derivative.is_some())
            .field("kinks", &self.kinks)
            .finish()
    }
}

pub(crate) fn centered_difference(f: &dyn Fn(f64) -> f64, domain: Interval, x: f64) -> f64 {
    let mut step = f64::EPSILON.cbrt() * (1.0 + x.abs());
    while !(domain.contains(x - step) && domain.contains(x + step)) && step > 1e-300 {
        step *= 0.5;
    }
    (f(x + step) - f(x - step)) / (2.0 * step)
}

/// Outcome of a limit search toward a domain end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Finite(f64),
    PosInfinity,
    NegInfinity,
}

impl Limit {
    /// As an extended real.
    pub fn value(self) -> f64 {
        match self {
            Limit::Finite(v) => v,
            Limit::PosInfinity => f64::INFINITY,
            Limit::NegInfinity => f64::NEG_INFINITY,
        }
    }
}

/// Decides convergence of a sequence of samples: finite when the last
/// increment is below `1e-6·(1+|v|)` and the values stay below `1e15`;
/// otherwise divergent in the direction of the trend. Once converging, a
/// jump in the increments is taken as the onset of rounding noise and the
/// value with the smallest increment so far is returned.
pub(crate) fn one_sided_limit<I: Iterator<Item = f64>>(values: I) -> Limit {
    let mut last: Option<f64> = None;
    let mut prev: Option<f64> = None;
    let mut first: Option<f64> = None;
    let mut overflow: Option<f64> = None;
    let mut settled: Option<(f64, f64)> = None;
    for v in values {
        if !v.is_finite() {
            if !v.is_nan() {
                overflow = Some(v);
            }
            break;
        }
        if first.is_none() {
            first = Some(v);
        }
        if let Some(l) = last {
            let inc = (v - l).abs();
            match settled {
                Some((best, at)) if inc > 2.0 * best => return Limit::Finite(at),
                Some((best, _)) if inc > best => {}
                _ if inc <= 1e-6 * (1.0 + v.abs()) && v.abs() < 1e15 => settled = Some((inc, v)),
                _ => {}
            }
        }
        prev = last;
        last = Some(v);
    }
    match (prev, last) {
        (Some(p), Some(l)) if l.abs() < 1e15 && (l - p).abs() <= 1e-6 * (1.0 + l.abs()) => Limit::Finite(l),
        _ if overflow.is_some() => {
            if overflow.unwrap() > 0.0 {
                Limit::PosInfinity
            } else {
                Limit::NegInfinity
            }
        }
        (_, Some(l)) => {
            let f = first.unwrap_or(l);
            if l >= f {
                Limit::PosInfinity
            } else {
                Limit::NegInfinity
            }
        }
        _ => Limit::Finite(f64::NAN),
    }
}
