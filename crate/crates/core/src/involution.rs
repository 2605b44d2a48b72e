//! Involutions of open intervals: verification, fixed points, normalization,
//! homothety and the catalog of named examples.
//!
//! An involution here is a continuous map `h` of an open interval `J` onto
//! itself with `h∘h = id`, `0 ∈ J`, `h(0) = 0` and `h ≠ id`. Such a map is
//! strictly decreasing and has exactly one fixed point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::interval::Interval;
use crate::roots;

/// Absolute plus relative tolerance budget: a residual `r` at `x` passes when
/// `r ≤ abs + rel·|x|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn bound(&self, x: f64) -> f64 {
        self.abs + self.rel * x.abs()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-9, rel: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct Involution {
    name: String,
    params: Vec<f64>,
    h: RealFunction,
    fixed_point: f64,
    smooth: bool,
}

/// JSON view of an involution.
#[derive(Debug, Clone, Serialize)]
pub struct InvolutionMeta {
    pub name: String,
    pub params: Vec<f64>,
    pub domain: Interval,
    pub fixed_point: f64,
    pub smooth: bool,
    pub kinks: Vec<f64>,
}

impl Involution {
    /// Packages `h` without verification. `smooth` should only be set when
    /// `h` carries a derivative valid on the whole domain.
    pub fn from_parts(
        name: impl Into<String>,
        params: Vec<f64>,
        h: RealFunction,
        fixed_point: f64,
        smooth: bool,
    ) -> Self {
        Self {
            name: name.into(),
            params,
            h,
            fixed_point,
            smooth,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn function(&self) -> &RealFunction {
        &self.h
    }

    pub fn domain(&self) -> Interval {
        self.h.domain()
    }

    pub fn fixed_point(&self) -> f64 {
        self.fixed_point
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn kinks(&self) -> &[f64] {
        self.h.kinks()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.h.eval(x)
    }

    #[inline]
    pub fn call(&self, x: f64) -> f64 {
        self.h.call(x)
    }

    pub fn derivative_at(&self, x: f64) -> f64 {
        self.h.derivative_at(x)
    }

    pub fn meta(&self) -> InvolutionMeta {
        InvolutionMeta {
            name: self.name.clone(),
            params: self.params.clone(),
            domain: self.domain(),
            fixed_point: self.fixed_point,
            smooth: self.smooth,
            kinks: self.kinks().to_vec(),
        }
    }

    /// Verifies with the default budget on `n` samples.
    pub fn verify(&self, n: usize) -> Result<VerificationReport> {
        verify_involution(&self.h, self.domain(), n, Tolerance::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub max_involution_residual: f64,
    /// Largest residual divided by its tolerance bound; passes when ≤ 1.
    pub worst_ratio: f64,
    pub worst_x: f64,
    pub monotonicity_ok: bool,
    /// `|h(0)|`, absent when `0 ∉ J`.
    pub origin_residual: Option<f64>,
    pub samples_used: usize,
    /// Samples whose image rounded onto an end of `J` and were skipped.
    pub saturated: usize,
    pub passed: bool,
}

/// Checks `h∘h = id`, strict decrease and `h(0) = 0` on an interior grid of
/// `J`.
///
/// The residual at `x` is compared with `tol.bound(x)` plus the rounding of
/// the intermediate `h(x)` carried through `|h'(h(x))|`, which dominates
/// where `h` is nearly flat close to an endpoint.
pub fn verify_involution(
    h: &RealFunction,
    j: Interval,
    n_samples: usize,
    tol: Tolerance,
) -> Result<VerificationReport> {
    if n_samples < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 samples, got {n_samples}"
        )));
    }
    let xs = j.sample_interior(n_samples);
    let mut max_res: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_x = f64::NAN;
    let mut images = Vec::with_capacity(xs.len());
    let mut saturated = 0;
    for &x in &xs {
        let hx = h.eval(x)?;
        if !j.contains(hx) {
            let outside = (j.lo() - hx).max(hx - j.hi());
            if outside <= tol.bound(hx) {
                // h(x) rounds onto the end of J, so h(h(x)) cannot be evaluated
                saturated += 1;
                continue;
            }
            return Err(Error::NotSelfMap { x, hx, domain: j });
        }
        let hhx = h.eval(hx)?;
        let r = (hhx - x).abs();
        // Rounding of the intermediate value h(x) propagates through h'(h(x)).
        let propagated = 4.0 * f64::EPSILON * (1.0 + hx.abs()) * h.derivative_at(hx).abs();
        let ratio = r / (tol.bound(x) + propagated);
        if r > max_res {
            max_res = r;
        }
        if ratio > worst_ratio || worst_x.is_nan() {
            worst_ratio = ratio;
            worst_x = x;
        }
        images.push(hx);
    }
    let monotonicity_ok = images.windows(2).all(|w| w[1] < w[0]);
    let origin_residual = if j.contains(0.0) {
        Some(h.eval(0.0)?.abs())
    } else {
        None
    };
    let passed = worst_ratio <= 1.0
        && 10 * saturated <= xs.len()
        && monotonicity_ok
        && origin_residual.is_some_and(|r| r <= tol.abs);
    Ok(VerificationReport {
        max_involution_residual: max_res,
        worst_ratio,
        worst_x,
        monotonicity_ok,
        origin_residual,
        samples_used: xs.len(),
        saturated,
        passed,
    })
}

/// Largest factor by which the fixed-point bracket search may grow.
pub const MAX_BRACKET_EXPANSION: f64 = 1e6;

/// Unique fixed point of a decreasing involution, as the zero of the
/// strictly increasing `k(x) = x − h(x)`.
///
/// The bracket is first taken as `(h(x₁), x₁)` from the midpoint `x₁`; if the
/// input does not behave like an involution there, steps doubling from
/// the midpoint toward both ends are tried, up to a [`MAX_BRACKET_EXPANSION`]
/// fold. The result satisfies `|x̄ − h(x̄)| ≤ tol` or an error is returned.
pub fn fixed_point(h: &RealFunction, j: Interval, tol: f64) -> Result<f64> {
    let k = |x: f64| x - h.call(x);
    let x1 = j.center();
    let k1 = k(x1);
    if k1 == 0.0 {
        return Ok(x1);
    }
    let mut bracket = None;
    let partner = h.call(x1);
    if j.contains(partner) && k(partner) * k1 < 0.0 {
        bracket = Some((partner, x1));
    }
    if bracket.is_none() {
        let d0 = j.scale() * 1e-3;
        let mut d = d0;
        let mut lo = x1;
        let mut hi = x1;
        while d <= MAX_BRACKET_EXPANSION * d0 {
            let cand_lo = if j.contains(x1 - d) { x1 - d } else { lo };
            let cand_hi = if j.contains(x1 + d) { x1 + d } else { hi };
            lo = cand_lo;
            hi = cand_hi;
            let (klo, khi) = (k(lo), k(hi));
            if klo <= 0.0 && khi >= 0.0 {
                bracket = Some((lo, hi));
                break;
            }
            d *= 2.0;
        }
    }
    let (a, b) = bracket.ok_or_else(|| Error::NoBracket {
        what: "the fixed point".into(),
    })?;
    let x = roots::bisect(k, a, b);
    let r = k(x).abs();
    if !(r <= tol) {
        return Err(Error::Verification(format!(
            "fixed point residual {r:e} exceeds {tol:e} at {x}"
        )));
    }
    Ok(x)
}

/// Conjugates `h` by the translation moving its fixed point to the origin:
/// `x ↦ h(x + x̄) − x̄` on `J − x̄`.
pub fn normalize(h: &RealFunction, j: Interval, tol: f64) -> Result<Involution> {
    let xbar = fixed_point(h, j, tol)?;
    let smooth = h.has_derivative() && h.kinks().is_empty();
    if xbar == 0.0 {
        return Ok(Involution::from_parts("normalized", vec![], h.restrict(j), 0.0, smooth));
    }
    let map = h.map();
    let shifted = RealFunction::new(j.translate(-xbar), move |x| map(x + xbar) - xbar)
        .with_kinks(h.kinks().iter().map(|k| k - xbar).collect());
    let shifted = match h.derivative_map() {
        Some(d) => shifted.with_derivative(move |x| d(x + xbar)),
        None => shifted,
    };
    Ok(Involution::from_parts("normalized", vec![xbar], shifted, 0.0, smooth))
}

/// `h̃(x) = h(a·x)/a` on `J/a`.
pub fn homothety(inv: &Involution, a: f64) -> Result<Involution> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "homothety factor must be nonzero, got {a}"
        )));
    }
    let domain = inv.domain().divide(a)?;
    let map = inv.h.map();
    let mut kinks: Vec<f64> = inv.kinks().iter().map(|k| k / a).collect();
    kinks.sort_by(f64::total_cmp);
    let f = RealFunction::new(domain, move |x| map(a * x) / a).with_kinks(kinks);
    let f = match inv.h.derivative_map() {
        Some(d) => f.with_derivative(move |x| d(a * x)),
        None => f,
    };
    let mut params = inv.params.clone();
    params.push(a);
    Ok(Involution::from_parts(
        format!("{}_scaled", inv.name),
        params,
        f,
        inv.fixed_point / a,
        inv.smooth,
    ))
}

/// Named involutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogEntry {
    /// `−x` on ℝ.
    Negation,
    /// `−x/λ` for `x ≤ 0`, `−λx` for `x > 0`; λ > 0.
    PiecewiseLinear { lambda: f64 },
    /// `ln(2 − eˣ)` on `(−∞, ln 2)`.
    LogExp,
    /// `−x/(1 + a·x)`.
    Rational { a: f64 },
    /// Global cube-root involution `∛(a − (x+m)³) − m`, `m = ∛(a/2)`.
    CubeRoot { a: f64 },
    /// The cube-root involution restricted to its smooth piece around 0.
    CubeRootSmooth { a: f64 },
    /// `x + 4 − 4√(1+x)` on `(−1, 3)`.
    Parabolic,
}

pub const CATALOG_NAMES: &[&str] = &[
    "negation",
    "piecewise_linear",
    "log_exp",
    "rational",
    "cube_root",
    "cube_root_smooth",
    "parabolic",
];

impl CatalogEntry {
    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let p = |i: usize, what: &str| {
            params
                .get(i)
                .copied()
                .ok_or_else(|| Error::InvalidParameter(format!("`{name}` needs parameter {what}")))
        };
        let entry = match name {
            "negation" => CatalogEntry::Negation,
            "piecewise_linear" => CatalogEntry::PiecewiseLinear {
                lambda: p(0, "lambda")?,
            },
            "log_exp" => CatalogEntry::LogExp,
            "rational" => CatalogEntry::Rational { a: p(0, "a")? },
            "cube_root" => CatalogEntry::CubeRoot { a: p(0, "a")? },
            "cube_root_smooth" => CatalogEntry::CubeRootSmooth { a: p(0, "a")? },
            "parabolic" => CatalogEntry::Parabolic,
            other => return Err(Error::UnknownName(other.to_string())),
        };
        Ok(entry)
    }

    pub fn build(self) -> Result<Involution> {
        match self {
            CatalogEntry::Negation => Ok(Involution::from_parts(
                "negation",
                vec![],
                RealFunction::new(Interval::real(), |x| -x).with_derivative(|_| -1.0),
                0.0,
                true,
            )),
            CatalogEntry::PiecewiseLinear { lambda } => {
                if !(lambda > 0.0) || !lambda.is_finite() {
                    return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
                }
                let smooth = lambda == 1.0;
                let kinks = if smooth { vec![] } else { vec![0.0] };
                let f = RealFunction::new(
                    Interval::real(),
                    move |x| {
                        if x <= 0.0 {
                            -x / lambda
                        } else {
                            -lambda * x
                        }
                    },
                )
                .with_derivative(move |x| if x <= 0.0 { -1.0 / lambda } else { -lambda })
                .with_kinks(kinks);
                Ok(Involution::from_parts("piecewise_linear", vec![lambda], f, 0.0, smooth))
            }
            CatalogEntry::LogExp => {
                let j = Interval::new(f64::NEG_INFINITY, 2f64.ln())?;
                // ln(2 − eˣ) = ln 2 + ln(1 − eˣ/2), written with ln_1p to keep
                // the origin exact.
                let f =
                    RealFunction::new(j, |x: f64| 2f64.ln() + (-0.5 * x.exp()).ln_1p()).with_derivative(|x: f64| {
                        let e = x.exp();
                        -e / (2.0 - e)
                    });
                Ok(Involution::from_parts("log_exp", vec![], f, 0.0, true))
            }
            CatalogEntry::Rational { a } => {
                if !a.is_finite() {
                    return Err(Error::InvalidParameter(format!("a must be finite, got {a}")));
                }
                let j = if a > 0.0 {
                    Interval::new(-1.0 / a, f64::INFINITY)?
                } else if a < 0.0 {
                    Interval::new(f64::NEG_INFINITY, -1.0 / a)?
                } else {
                    Interval::real()
                };
                let f = RealFunction::new(j, move |x| -x / (1.0 + a * x)).with_derivative(move |x| {
                    let d = 1.0 + a * x;
                    -1.0 / (d * d)
                });
                Ok(Involution::from_parts("rational", vec![a], f, 0.0, true))
            }
            CatalogEntry::CubeRoot { a } => {
                if !a.is_finite() {
                    return Err(Error::InvalidParameter(format!("a must be finite, got {a}")));
                }
                let m = (a / 2.0).cbrt();
                let f = RealFunction::new(Interval::real(), move |x| cube_root_map(a, m, x))
                    .with_derivative(move |x| cube_root_derivative(a, m, x));
                if a == 0.0 {
                    return Ok(Involution::from_parts("cube_root", vec![a], f, 0.0, true));
                }
                // Vertical tangent at ∛a − m and its horizontal mirror at −m.
                let mut kinks = vec![a.cbrt() - m, -m];
                kinks.sort_by(f64::total_cmp);
                Ok(Involution::from_parts(
                    "cube_root",
                    vec![a],
                    f.with_kinks(kinks),
                    0.0,
                    false,
                ))
            }
            CatalogEntry::CubeRootSmooth { a } => {
                if a == 0.0 || !a.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "a must be finite and nonzero, got {a}"
                    )));
                }
                let m = (a / 2.0).cbrt();
                let e1 = -m;
                let e2 = a.cbrt() - m;
                let j = Interval::new(e1.min(e2), e1.max(e2))?;
                let f = RealFunction::new(j, move |x| cube_root_map(a, m, x))
                    .with_derivative(move |x| cube_root_derivative(a, m, x));
                Ok(Involution::from_parts("cube_root_smooth", vec![a], f, 0.0, true))
            }
            CatalogEntry::Parabolic => {
                let j = Interval::new(-1.0, 3.0)?;
                let f = RealFunction::new(j, |x: f64| x + 4.0 - 4.0 * (1.0 + x).sqrt())
                    .with_derivative(|x: f64| 1.0 - 2.0 / (1.0 + x).sqrt());
                Ok(Involution::from_parts("parabolic", vec![], f, 0.0, true))
            }
        }
    }
}

// a − (x+m)³ factored as (∛a − m − x)·(A² + A·s + s²) so that points near
// the vertical tangent keep their relative precision.
fn cube_root_map(a: f64, m: f64, x: f64) -> f64 {
    let root = a.cbrt();
    let s = x + m;
    let inner = ((root - m) - x) * (root * root + root * s + s * s);
    inner.cbrt() - m
}

fn cube_root_derivative(a: f64, m: f64, x: f64) -> f64 {
    let s = x + m;
    let inner = cube_root_map(a, m, x) + m;
    -(s * s) / (inner * inner)
}

/// Builds a catalog involution by name.
pub fn catalog(name: &str, params: &[f64]) -> Result<Involution> {
    CatalogEntry::parse(name, params)?.build()
}

/// Every catalog entry with representative parameters.
pub fn catalog_examples() -> Vec<Involution> {
    [
        CatalogEntry::Negation,
        CatalogEntry::PiecewiseLinear { lambda: 2.0 },
        CatalogEntry::PiecewiseLinear { lambda: 0.5 },
        CatalogEntry::LogExp,
        CatalogEntry::Rational { a: 1.0 },
        CatalogEntry::Rational { a: -1.0 },
        CatalogEntry::Rational { a: 2.0 },
        CatalogEntry::CubeRoot { a: 2.0 },
        CatalogEntry::CubeRootSmooth { a: 2.0 },
        CatalogEntry::Parabolic,
    ]
    .into_iter()
    .map(|e| e.build().expect("catalog parameters are valid"))
    .collect()
}
