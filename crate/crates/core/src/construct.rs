//! Involutions from even functions, even functions from involutions, and
//! involutions traced from symmetric implicit equations.
//!
//! For an even `P` with `P(0) = 0`, the map `K(y) = (y + P(y))/2` is
//! increasing near 0. On the largest symmetric interval `I` where it stays
//! increasing, its inverse `k = K⁻¹: J → I` gives the involution
//! `h(x) = x − k(x)` on `J = K(I)`. Conversely every involution yields the
//! displacement `k(x) = x − h(x)` and the even function `P(y) = 2k⁻¹(y) − y`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{Map, RealFunction};
use crate::interp::MonotoneCubic;
use crate::interval::{Interval, Side};
use crate::involution::{verify_involution, Involution, Tolerance, VerificationReport};
use crate::roots;

/// Relative residual allowed when inverting a monotone map.
pub const INVERSION_TOL: f64 = 1e-12;

/// Grid size of the monotonicity certificate for merely continuous `P`.
pub const C0_CERTIFICATE_POINTS: usize = 10_000;

/// Samples used when checking evenness and the constructed involution.
const CHECK_SAMPLES: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Continuity {
    C0,
    C1,
}

/// An even function on a symmetric interval with `P(0) = 0`.
#[derive(Debug, Clone)]
pub struct EvenFunction {
    p: RealFunction,
    class: Continuity,
    evenness_residual: f64,
}

impl EvenFunction {
    /// Checks the domain is symmetric, `P(0) = 0` and `P(y) = P(−y)` on an
    /// interior grid (relative residual at most `1e-9`).
    pub fn new(p: RealFunction, class: Continuity) -> Result<Self> {
        let d = p.domain();
        if !d.is_symmetric() {
            return Err(Error::InvalidParameter(format!(
                "even function needs a symmetric domain, got {d}"
            )));
        }
        let p0 = p.eval(0.0)?;
        if p0.abs() > 1e-12 {
            return Err(Error::NonzeroAtOrigin(p0));
        }
        let mut worst: f64 = 0.0;
        for y in d.sample_interior(CHECK_SAMPLES).into_iter().filter(|&y| y > 0.0) {
            let (a, b) = (p.eval(y)?, p.eval(-y)?);
            let r = (a - b).abs();
            if r > 1e-9 * (1.0 + a.abs()) {
                return Err(Error::NotEven { y, residual: r });
            }
            worst = worst.max(r);
        }
        Ok(Self {
            p,
            class,
            evenness_residual: worst,
        })
    }

    pub fn function(&self) -> &RealFunction {
        &self.p
    }

    pub fn class(&self) -> Continuity {
        self.class
    }

    pub fn domain(&self) -> Interval {
        self.p.domain()
    }

    /// Largest `|P(y) − P(−y)|` seen when the function was checked.
    pub fn evenness_residual(&self) -> f64 {
        self.evenness_residual
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        self.p.eval(y)
    }
}

/// Output of [`from_even_function`].
#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub h: Involution,
    /// `K(y) = (y + P(y))/2` on `I`.
    pub half_sum: RealFunction,
    /// `k = K⁻¹` on `J`, the displacement `x − h(x)`.
    pub displacement: RealFunction,
    pub i: Interval,
    pub j: Interval,
    pub report: VerificationReport,
}

/// Solves `K(y) = x` for increasing `K` inside `bracket`.
///
/// Starting from the bracket center, points walk geometrically toward the
/// side where `x` lies until `K` crosses it; the resulting sub-bracket is
/// refined by safeguarded Newton when `K` has an analytic derivative and by
/// bisection otherwise. The answer never leaves the bracket.
pub fn invert_monotone(k: &RealFunction, x: f64, bracket: Interval, tol: f64) -> Result<f64> {
    let c = bracket.center();
    let kc = k.call(c);
    if kc == x {
        return Ok(c);
    }
    if kc.is_nan() {
        return Err(Error::NonFinite { x: c });
    }
    let side = if kc < x { Side::Hi } else { Side::Lo };
    let mut inner = c;
    let mut last = kc;
    let mut outer = None;
    for p in bracket.approach(c, side, 1100) {
        let v = k.call(p);
        if v.is_nan() {
            break;
        }
        let (crossed, backwards) = match side {
            Side::Hi => (v >= x, v < last),
            Side::Lo => (v <= x, v > last),
        };
        if backwards {
            return Err(Error::NonMonotone { at: p });
        }
        last = v;
        if crossed {
            outer = Some(p);
            break;
        }
        inner = p;
    }
    let outer = match outer {
        Some(o) => o,
        None => return saturated_end(k, x, bracket, side, inner, tol),
    };
    let (a, b) = match side {
        Side::Hi => (inner, outer),
        Side::Lo => (outer, inner),
    };
    let g = |y: f64| k.call(y) - x;
    let y = if let Some(d) = k.derivative_map() {
        roots::newton_increasing(g, |y| d(y), a, b).map_err(|at| Error::NonMonotone { at })?
    } else {
        roots::bisect(g, a, b)
    };
    let r = g(y).abs();
    // A collapsed bracket on a steep K leaves a residual of about K'·ulp(y).
    let slope_floor = 8.0 * f64::EPSILON * (1.0 + y.abs()) * k.derivative_at(y).abs();
    // or K jumps over x between neighbouring floats
    let straddles = k.call(y.next_down()) <= x && k.call(y.next_up()) >= x;
    if !(r <= tol.max(slope_floor) || straddles) {
        return Err(Error::Inversion {
            attempted: x,
            reason: format!("residual {r:e} at y = {y}"),
        });
    }
    Ok(y)
}

/// The walk stopped next to a finite end of the bracket, at its last float
/// or where `K` stops being evaluable, without crossing `x`. If `K` is so
/// steep there that a few ulps of `y` span the gap to `x`, the last point is
/// the inverse to working precision.
fn saturated_end(k: &RealFunction, x: f64, bracket: Interval, side: Side, last: f64, tol: f64) -> Result<f64> {
    let end = bracket.end(side);
    let r = (k.call(last) - x).abs();
    let floor = 8.0 * f64::EPSILON * (1.0 + last.abs()) * k.derivative_at(last).abs();
    if end.is_finite() && (end - last).abs() <= 1e-9 * (1.0 + end.abs()) && r <= tol.max(floor) {
        return Ok(last);
    }
    Err(Error::Inversion {
        attempted: x,
        reason: format!("value not attained on {bracket}"),
    })
}

fn inversion_tol(x: f64) -> f64 {
    INVERSION_TOL * (1.0 + x.abs())
}

/// Largest symmetric `(−r, r)` inside the domain of `P` on which
/// `K(y) = (y + P(y))/2` is increasing.
///
/// For `C1` input, `K' = (1 + P')/2` is scanned outward on a geometric grid
/// (ratio `2^(1/8)`) on both sides, the first sign change is refined by
/// bisection, and `r` is the smaller root magnitude (or the domain
/// half-width). For `C0` input, strict increase of `K` is certified on a grid
/// of [`C0_CERTIFICATE_POINTS`] points instead.
pub fn maximal_interval(p: &EvenFunction) -> Result<Interval> {
    let f = p.function();
    let d = p.domain();
    let half_width = d.hi();
    match p.class {
        Continuity::C1 => {
            let kprime = |y: f64| 0.5 * (1.0 + f.derivative_at(y));
            let mut r = half_width;
            for sign in [1.0, -1.0] {
                if let Some(root) = first_sign_change(&kprime, d, sign) {
                    r = r.min(root.abs());
                }
            }
            Interval::symmetric(r)
        }
        Continuity::C0 => {
            let k = |y: f64| 0.5 * (y + f.call(y));
            let grid = d.sample_interior(C0_CERTIFICATE_POINTS);
            let pos: Vec<f64> = grid.iter().copied().filter(|&y| y > 0.0).collect();
            let neg: Vec<f64> = grid.iter().rev().copied().filter(|&y| y < 0.0).collect();
            let mut r = half_width;
            let mut last = (0.0, k(0.0));
            for &y in &pos {
                let v = k(y);
                if !(v > last.1) {
                    r = r.min(last.0);
                    break;
                }
                last = (y, v);
            }
            let mut last = (0.0, k(0.0));
            for &y in &neg {
                let v = k(y);
                if !(v < last.1) {
                    r = r.min(-last.0);
                    break;
                }
                last = (y, v);
            }
            if !(r > 0.0) {
                return Err(Error::NonMonotone { at: 0.0 });
            }
            Interval::symmetric(r)
        }
    }
}

const KPRIME_NOISE: f64 = 1e-12;

/// First zero of `kprime` walking from 0 in direction `sign` inside `d`.
fn first_sign_change(kprime: &dyn Fn(f64) -> f64, d: Interval, sign: f64) -> Option<f64> {
    let r = d.hi();
    let y0 = 1e-3 * d.scale();
    let ratio = 2f64.powf(0.125);
    let mut pts = Vec::new();
    let mut y = y0;
    let limit = if r.is_finite() { 0.5 * r } else { 1e8 * d.scale() };
    while y < limit {
        pts.push(y);
        y *= ratio;
    }
    if r.is_finite() {
        pts.extend(d.approach(0.0, Side::Hi, 60).into_iter().filter(|&p| p >= limit));
    }
    let mut prev = 0.0;
    for &y in &pts {
        let v = kprime(sign * y);
        if v.is_nan() {
            return None;
        }
        // K' of a flat end can round to 0 or just below it
        if v < -KPRIME_NOISE {
            let root = roots::bisect(|t| kprime(sign * t), prev, y);
            return Some(sign * root);
        }
        prev = y;
    }
    None
}

/// Builds the involution `h(x) = x − K⁻¹(x)` from an even function.
pub fn from_even_function(p: &EvenFunction) -> Result<ConstructionResult> {
    let i = maximal_interval(p)?;
    let pm = p.function().map();
    let half_sum = RealFunction::new(i, move |y| 0.5 * (y + pm(y)));
    let half_sum = match p.function().derivative_map() {
        Some(pd) => half_sum.with_derivative(move |y| 0.5 * (1.0 + pd(y))),
        None => half_sum,
    };
    let lo = half_sum.limit(Side::Lo).value();
    let hi = half_sum.limit(Side::Hi).value();
    let j = Interval::new(lo, hi)?;

    let kk = half_sum.clone();
    let inverse: Map = Arc::new(move |x: f64| invert_monotone(&kk, x, i, inversion_tol(x)).unwrap_or(f64::NAN));
    let kinks: Vec<f64> = {
        let mut v: Vec<f64> = p
            .function()
            .kinks()
            .iter()
            .filter(|y| i.contains(**y))
            .map(|&y| half_sum.call(y))
            .collect();
        if p.class == Continuity::C0 && v.is_empty() {
            v.push(0.0);
        }
        v.sort_by(f64::total_cmp);
        v
    };
    let displacement = {
        let inv = Arc::clone(&inverse);
        let f = RealFunction::new(j, move |x| inv(x));
        match half_sum.derivative_map() {
            Some(kd) => {
                let inv = Arc::clone(&inverse);
                f.with_derivative(move |x| 1.0 / kd(inv(x)))
            }
            None => f,
        }
    };
    let h = {
        let inv = Arc::clone(&inverse);
        let f = RealFunction::new(j, move |x| x - inv(x)).with_kinks(kinks);
        match half_sum.derivative_map() {
            Some(kd) => {
                let inv = Arc::clone(&inverse);
                f.with_derivative(move |x| 1.0 - 1.0 / kd(inv(x)))
            }
            None => f,
        }
    };
    let smooth = p.class == Continuity::C1 && h.has_derivative();
    let h = Involution::from_parts("even_construction", vec![], h, 0.0, smooth);
    let report = verify_involution(h.function(), j, CHECK_SAMPLES, Tolerance::default())?;
    if !report.passed {
        return Err(Error::Verification(format!(
            "constructed map is not an involution: worst ratio {} at {}",
            report.worst_ratio, report.worst_x
        )));
    }
    Ok(ConstructionResult {
        h,
        half_sum,
        displacement,
        i,
        j,
        report,
    })
}

/// Recovers the even function `P(y) = 2k⁻¹(y) − y` with `k(x) = x − h(x)`.
pub fn even_from_involution(h: &Involution) -> Result<EvenFunction> {
    let j = h.domain();
    let hm = h.function().map();
    let disp = RealFunction::new(j, move |x| x - hm(x));
    let disp = match h.function().derivative_map() {
        Some(hd) => disp.with_derivative(move |x| 1.0 - hd(x)),
        None => disp,
    };
    let lo = disp.limit(Side::Lo).value();
    let hi = disp.limit(Side::Hi).value();
    let r = (-lo).min(hi);
    // Limits at a cube-root-type end resolve only to about ε^(1/3).
    if lo.is_finite() && hi.is_finite() && (lo + hi).abs() > 1e-4 * (1.0 + r) {
        return Err(Error::Verification(format!(
            "displacement image ({lo}, {hi}) is not symmetric"
        )));
    }
    let i = Interval::symmetric(r)?;
    let dd = disp.clone();
    let inverse: Map = Arc::new(move |y: f64| invert_monotone(&dd, y, j, inversion_tol(y)).unwrap_or(f64::NAN));
    let mut kinks: Vec<f64> = h
        .kinks()
        .iter()
        .map(|&x| disp.call(x))
        .flat_map(|y| [y, -y])
        .filter(|y| i.contains(*y))
        .collect();
    kinks.sort_by(f64::total_cmp);
    kinks.dedup();
    let inv = Arc::clone(&inverse);
    let p = RealFunction::new(i, move |y| 2.0 * inv(y) - y).with_kinks(kinks);
    let p = match disp.derivative_map() {
        Some(dd) => {
            let inv = Arc::clone(&inverse);
            p.with_derivative(move |y| 2.0 / dd(inv(y)) - 1.0)
        }
        None => p,
    };
    let class = if h.is_smooth() { Continuity::C1 } else { Continuity::C0 };
    EvenFunction::new(p, class)
}

type Bivariate = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `f(x, y) = 0` with `f` symmetric on the square `Ω = region × region`.
#[derive(Clone)]
pub struct SymmetricEquation {
    f: Bivariate,
    d2: Option<Bivariate>,
    region: Interval,
}

impl std::fmt::Debug for SymmetricEquation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymmetricEquation")
            .field("region", &self.region)
            .field("analytic_partial", &self.d2.is_some())
            .finish()
    }
}

/// Symmetry residual allowed on sampled pairs, relative to `1 + |f|`.
const SYMMETRY_TOL: f64 = 1e-12;

impl SymmetricEquation {
    /// Checks `f(0,0) = 0` and `f(x,y) = f(y,x)` on a grid of `Ω`.
    pub fn new<F>(region: Interval, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !region.contains(0.0) {
            return Err(Error::InvalidParameter(format!("region {region} must contain 0")));
        }
        let f0 = f(0.0, 0.0);
        if f0.abs() > 1e-14 {
            return Err(Error::NonzeroAtOrigin(f0));
        }
        let grid = region.sample_interior(21);
        for &x in &grid {
            for &y in &grid {
                let (a, b) = (f(x, y), f(y, x));
                let r = (a - b).abs();
                if r > SYMMETRY_TOL * (1.0 + a.abs()) {
                    return Err(Error::Asymmetric { x, y, residual: r });
                }
            }
        }
        Ok(Self {
            f: Arc::new(f),
            d2: None,
            region,
        })
    }

    /// Supplies `∂f/∂y`; `∂f/∂x(x, y)` is then `∂f/∂y(y, x)`.
    pub fn with_partial<D>(mut self, d2: D) -> Self
    where
        D: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn region(&self) -> Interval {
        self.region
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    pub fn partial_y(&self, x: f64, y: f64) -> f64 {
        match &self.d2 {
            Some(d) => d(x, y),
            None => {
                let s = f64::EPSILON.cbrt() * (1.0 + y.abs());
                ((self.f)(x, y + s) - (self.f)(x, y - s)) / (2.0 * s)
            }
        }
    }

    pub fn partial_x(&self, x: f64, y: f64) -> f64 {
        self.partial_y(y, x)
    }
}

/// Why a continuation side stopped before the end of the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Truncation {
    /// `|∂f/∂y|` dropped below `1e-8·(1 + |∂f/∂x|)`.
    DegenerateBranch { x: f64, y: f64 },
    /// The traced point left `Ω`.
    LeftRegion { x: f64 },
    /// No solution near the previous point.
    NoSolution { x: f64 },
}

/// Output of [`from_symmetric_equation`].
#[derive(Debug, Clone)]
pub struct ImplicitTrace {
    pub involution: Involution,
    /// Traced points `(x, h(x))`, ascending in `x`, including the origin.
    pub table: Vec<(f64, f64)>,
    pub truncated_below: Option<Truncation>,
    pub truncated_above: Option<Truncation>,
    /// Largest `|f(x, h(x))|` over the table.
    pub max_equation_residual: f64,
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 60;

/// Traces the branch of `f(x, y) = 0` through the origin on `x_grid`.
///
/// Each side of the origin is followed outward: the previous solution plus
/// a tangent predictor seeds a Newton solve in `y`, with a bisection
/// fallback on a bracket of twice the previous step grown as needed. A side
/// stops when `∂f/∂y` effectively vanishes, the point leaves `Ω`, or the
/// branch turns back. The table and its mirror image feed a monotone cubic
/// interpolant of `x` against the displacement `x − h(x)`, which keeps the
/// interpolated map an involution on its whole domain.
pub fn from_symmetric_equation(eq: &SymmetricEquation, x_grid: &[f64]) -> Result<ImplicitTrace> {
    if !x_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter("x_grid must be strictly ascending".into()));
    }
    let fy0 = eq.partial_y(0.0, 0.0);
    if fy0 == 0.0 || fy0.is_nan() || degenerate(eq, 0.0, 0.0) {
        return Err(Error::DegenerateOrigin);
    }
    let above: Vec<f64> = x_grid.iter().copied().filter(|&x| x > 0.0).collect();
    let below: Vec<f64> = x_grid.iter().rev().copied().filter(|&x| x < 0.0).collect();
    let (pts_above, truncated_above) = trace_side(eq, &above, 1.0);
    let (pts_below, truncated_below) = trace_side(eq, &below, -1.0);

    let mut table: Vec<(f64, f64, f64)> = Vec::new();
    table.extend(pts_below.into_iter().rev());
    table.push((0.0, 0.0, -1.0));
    table.extend(pts_above);
    if table.len() < 3 {
        return Err(Error::Verification(
            "continuation produced fewer than three points".into(),
        ));
    }
    let max_equation_residual = table.iter().map(|&(x, y, _)| eq.eval(x, y).abs()).fold(0.0, f64::max);

    // Interpolate x as a function of the displacement d = x − y. A traced
    // point (x, y) with slope m gives the node (d, x) with slope 1/(1 − m)
    // and its mirror (−d, y) with slope −m/(1 − m), so the spline K satisfies
    // K(d) − K(−d) = d segment by segment and x ↦ x − K⁻¹(x) is an exact
    // involution of the interpolated curve.
    let mut nodes: Vec<(f64, f64, f64)> = Vec::with_capacity(2 * table.len());
    for &(x, y, m) in &table {
        nodes.push((x - y, x, 1.0 / (1.0 - m)));
        nodes.push((y - x, y, -m / (1.0 - m)));
    }
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes.dedup_by(|b, a| (b.0 - a.0).abs() <= 1e-12 * (1.0 + a.0.abs()));
    let ds: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let xs: Vec<f64> = nodes.iter().map(|n| n.1).collect();
    let ms: Vec<f64> = nodes.iter().map(|n| n.2).collect();
    let d_range = Interval::new(ds[0], ds[ds.len() - 1])?;
    let domain = Interval::new(xs[0], xs[xs.len() - 1])?;
    let spline = Arc::new(MonotoneCubic::new(ds, xs, Some(ms)));
    let (s1, s2) = (Arc::clone(&spline), Arc::clone(&spline));
    let big_k = RealFunction::new(d_range, move |d| s1.eval(d)).with_derivative(move |d| s2.derivative(d));
    let kk = big_k.clone();
    let inverse: Map = Arc::new(move |x: f64| invert_monotone(&kk, x, d_range, inversion_tol(x)).unwrap_or(f64::NAN));
    let inv = Arc::clone(&inverse);
    let h = RealFunction::new(domain, move |x| x - inv(x))
        .with_derivative(move |x| 1.0 - 1.0 / spline.derivative(inverse(x)));
    let involution = Involution::from_parts("implicit", vec![], h, 0.0, true);
    Ok(ImplicitTrace {
        involution,
        table: table.into_iter().map(|(x, y, _)| (x, y)).collect(),
        truncated_below,
        truncated_above,
        max_equation_residual,
    })
}

fn degenerate(eq: &SymmetricEquation, x: f64, y: f64) -> bool {
    eq.partial_y(x, y).abs() < 1e-8 * (1.0 + eq.partial_x(x, y).abs())
}

fn trace_side(eq: &SymmetricEquation, xs: &[f64], direction: f64) -> (Vec<(f64, f64, f64)>, Option<Truncation>) {
    let region = eq.region();
    let mut out = Vec::new();
    let (mut x_prev, mut y_prev, mut slope) = (0.0, 0.0, -1.0);
    let mut dy_prev: f64 = 0.0;
    for &x in xs {
        if !region.contains(x) {
            return (out, Some(Truncation::LeftRegion { x }));
        }
        let dx = x - x_prev;
        let guess = y_prev + slope * dx;
        let y = newton_y(eq, x, guess)
            .filter(|y| region.contains(*y) && (y - y_prev) * direction < 0.0)
            .or_else(|| bisect_y(eq, x, y_prev, 2.0 * dx.abs().max(dy_prev.abs())));
        let Some(y) = y else {
            return (out, Some(Truncation::NoSolution { x }));
        };
        if !region.contains(y) {
            return (out, Some(Truncation::LeftRegion { x }));
        }
        if (y - y_prev) * direction >= 0.0 {
            return (out, Some(Truncation::NoSolution { x }));
        }
        if degenerate(eq, x, y) {
            return (out, Some(Truncation::DegenerateBranch { x, y }));
        }
        slope = -eq.partial_x(x, y) / eq.partial_y(x, y);
        dy_prev = y - y_prev;
        out.push((x, y, slope));
        x_prev = x;
        y_prev = y;
    }
    (out, None)
}

fn newton_y(eq: &SymmetricEquation, x: f64, mut y: f64) -> Option<f64> {
    for _ in 0..NEWTON_MAX_ITER {
        let fy = eq.partial_y(x, y);
        if fy == 0.0 || !fy.is_finite() {
            return None;
        }
        let step = eq.eval(x, y) / fy;
        if !step.is_finite() {
            return None;
        }
        y -= step;
        if step.abs() <= NEWTON_TOL * (1.0 + y.abs()) {
            return Some(y);
        }
    }
    None
}

fn bisect_y(eq: &SymmetricEquation, x: f64, center: f64, half: f64) -> Option<f64> {
    let region = eq.region();
    let mut half = half.max(1e-12);
    for _ in 0..8 {
        let a = (center - half).max(region.lo());
        let b = (center + half).min(region.hi());
        let a = if region.contains(a) { a } else { next_inside(a, region) };
        let b = if region.contains(b) { b } else { next_inside(b, region) };
        let (fa, fb) = (eq.eval(x, a), eq.eval(x, b));
        if fa * fb <= 0.0 {
            return Some(roots::bisect(|y| eq.eval(x, y), a, b));
        }
        half *= 2.0;
    }
    None
}

fn next_inside(v: f64, region: Interval) -> f64 {
    if v <= region.lo() {
        region.lo() + f64::EPSILON * (1.0 + region.lo().abs())
    } else {
        region.hi() - f64::EPSILON * (1.0 + region.hi().abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::involution::catalog;

    fn poly_even(c2: f64, c6: f64) -> EvenFunction {
        let p = RealFunction::new(Interval::real(), move |y: f64| c2 * y * y + c6 * y.powi(6))
            .with_derivative(move |y: f64| 2.0 * c2 * y + 6.0 * c6 * y.powi(5));
        EvenFunction::new(p, Continuity::C1).unwrap()
    }

    #[test]
    fn invert_simple_maps() {
        let k = RealFunction::new(Interval::real(), |y| y / 2.0 + y * y / 16.0).with_derivative(|y| 0.5 + y / 8.0);
        let y = invert_monotone(&k, 0.21, Interval::symmetric(4.0).unwrap(), 1e-14).unwrap();
        assert!((y - 0.4).abs() < 1e-15);
        let lin = RealFunction::new(Interval::real(), |y| y / 2.0);
        assert!((invert_monotone(&lin, 1.0, Interval::real(), 1e-14).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn invert_outside_range_fails() {
        let k = RealFunction::new(Interval::symmetric(1.0).unwrap(), |y| y);
        assert!(matches!(
            invert_monotone(&k, 2.0, Interval::symmetric(1.0).unwrap(), 1e-12),
            Err(Error::Inversion { .. })
        ));
    }

    #[test]
    fn invert_reports_negative_derivative() {
        let k =
            RealFunction::new(Interval::real(), |y: f64| y - 3.0 * y.sin()).with_derivative(|y| 1.0 - 3.0 * y.cos());
        let r = invert_monotone(&k, 0.1, Interval::real(), 1e-12);
        assert!(matches!(r, Err(Error::NonMonotone { .. })), "{r:?}");
    }

    #[test]
    fn maximal_intervals() {
        assert_eq!(
            maximal_interval(&poly_even(0.125, 0.0)).unwrap(),
            Interval::symmetric(4.0).unwrap()
        );
        let r6 = maximal_interval(&poly_even(0.0, 1.0)).unwrap().hi();
        assert!((r6 - 6f64.powf(-0.2)).abs() < 1e-15);
        assert_eq!(maximal_interval(&poly_even(0.0, 0.0)).unwrap(), Interval::real());
    }

    #[test]
    fn even_function_checks() {
        let odd = RealFunction::new(Interval::real(), |y| y * y * y);
        assert!(matches!(
            EvenFunction::new(odd, Continuity::C1),
            Err(Error::NotEven { .. })
        ));
        let shifted = RealFunction::new(Interval::real(), |y| 1.0 + y * y);
        assert!(matches!(
            EvenFunction::new(shifted, Continuity::C1),
            Err(Error::NonzeroAtOrigin(_))
        ));
        let lopsided = RealFunction::new(Interval::new(-1.0, 2.0).unwrap(), |y| y * y);
        assert!(EvenFunction::new(lopsided, Continuity::C1).is_err());
    }

    #[test]
    fn zero_gives_negation() {
        let c = from_even_function(&poly_even(0.0, 0.0)).unwrap();
        assert_eq!(c.j, Interval::real());
        for x in [-3.0, -0.2, 0.0, 1.5] {
            assert!((c.h.eval(x).unwrap() + x).abs() < 1e-14);
        }
    }

    #[test]
    fn parabola_gives_parabolic_involution() {
        let c = from_even_function(&poly_even(0.125, 0.0)).unwrap();
        assert_eq!(c.i, Interval::symmetric(4.0).unwrap());
        assert!((c.j.lo() + 1.0).abs() < 1e-14 && (c.j.hi() - 3.0).abs() < 1e-14);
        for x in [-0.99f64, -0.5, 0.21, 1.0, 2.9] {
            let want = x + 4.0 - 4.0 * (1.0f64 + x).sqrt();
            assert!((c.h.eval(x).unwrap() - want).abs() < 1e-13);
            let kwant = -4.0 + 4.0 * (1.0f64 + x).sqrt();
            assert!((c.displacement.eval(x).unwrap() - kwant).abs() < 1e-13);
        }
    }

    #[test]
    fn sextic_interval_endpoints() {
        let c = from_even_function(&poly_even(0.0, 1.0)).unwrap();
        let s = 12.0 * 6f64.powf(0.2);
        assert!((c.j.lo() + 5.0 / s).abs() < 1e-10);
        assert!((c.j.hi() - 7.0 / s).abs() < 1e-10);
    }

    #[test]
    fn abs_even_function_recovers_piecewise_linear() {
        let lambda: f64 = 2.0;
        let c0 = (1.0 - lambda) / (1.0 + lambda);
        let p = RealFunction::new(Interval::real(), move |y: f64| c0 * y.abs()).with_kinks(vec![0.0]);
        let c = from_even_function(&EvenFunction::new(p, Continuity::C0).unwrap()).unwrap();
        assert!((c.h.eval(1.0).unwrap() + 2.0).abs() < 1e-9);
        assert!((c.h.eval(-2.0).unwrap() - 1.0).abs() < 1e-9);
        assert!(!c.h.is_smooth());
    }

    #[test]
    fn recovered_even_functions() {
        let neg = catalog("negation", &[]).unwrap();
        let p = even_from_involution(&neg).unwrap();
        assert!(p.eval(2.0).unwrap().abs() < 1e-15);

        let pl = catalog("piecewise_linear", &[3.0]).unwrap();
        let p = even_from_involution(&pl).unwrap();
        assert_eq!(p.class(), Continuity::C0);
        assert!((p.eval(2.0).unwrap() + 1.0).abs() < 1e-12);

        let le = catalog("log_exp", &[]).unwrap();
        let p = even_from_involution(&le).unwrap();
        assert_eq!(p.domain(), Interval::real());
        assert!((p.eval(2.0).unwrap() + 2.0 * 1f64.cosh().ln()).abs() < 1e-12);
    }

    #[test]
    fn linear_equation_traces_negation() {
        let eq = SymmetricEquation::new(Interval::real(), |x, y| x + y).unwrap();
        let grid: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.1).collect();
        let t = from_symmetric_equation(&eq, &grid).unwrap();
        for x in [-1.55, 0.0, 0.33, 1.99] {
            assert!((t.involution.eval(x).unwrap() + x).abs() < 1e-13);
        }
        assert!(t.truncated_above.is_none() && t.truncated_below.is_none());
    }

    #[test]
    fn hyperbola_traces_rational() {
        let eq = SymmetricEquation::new(Interval::new(-1.0, f64::INFINITY).unwrap(), |x, y| x + y + x * y)
            .unwrap()
            .with_partial(|x, _| 1.0 + x);
        let grid: Vec<f64> = (0..=200).map(|i| -0.9 + i as f64 * 0.05).collect();
        let t = from_symmetric_equation(&eq, &grid).unwrap();
        for &(x, y) in &t.table {
            assert!((y + x / (1.0 + x)).abs() < 1e-12, "{x} {y}");
        }
        assert!(t.involution.verify(201).unwrap().passed);
    }

    #[test]
    fn cubic_truncates_at_vertical_tangent() {
        let c = 2f64.cbrt() - 1.0;
        let eq = SymmetricEquation::new(Interval::new(-1.0, c).unwrap(), |x: f64, y: f64| {
            (x + 1.0).powi(3) + (y + 1.0).powi(3) - 2.0
        })
        .unwrap()
        .with_partial(|_, y: f64| 3.0 * (y + 1.0).powi(2));
        let grid: Vec<f64> = (1..2000).map(|i| -1.0 + (c + 1.0) * i as f64 / 2000.0).collect();
        let t = from_symmetric_equation(&eq, &grid).unwrap();
        let h = |x: f64| (2.0 - (x + 1.0).powi(3)).cbrt() - 1.0;
        for &(x, y) in &t.table {
            assert!((y - h(x)).abs() < 1e-12);
        }
        assert!((t.involution.eval(0.2).unwrap() - h(0.2)).abs() < 1e-8);
    }

    #[test]
    fn degenerate_origin_is_fatal() {
        let eq = SymmetricEquation::new(Interval::real(), |x: f64, y: f64| x * x + y * y).unwrap();
        let grid = [-0.1, 0.0, 0.1];
        assert!(matches!(
            from_symmetric_equation(&eq, &grid),
            Err(Error::DegenerateOrigin)
        ));
    }

    #[test]
    fn asymmetric_equation_rejected() {
        let e = SymmetricEquation::new(Interval::real(), |x, y| x + 2.0 * y);
        assert!(matches!(e, Err(Error::Asymmetric { .. })));
    }
}
