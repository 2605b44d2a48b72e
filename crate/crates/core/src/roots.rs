//! Scalar root finding on brackets.

/// Bisection on `[a, b]` where `f(a)` and `f(b)` have opposite signs (or one
/// is zero). Runs until the midpoint no longer separates the endpoints, so
/// the result is exact to the last representable bit.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    let fb = f(b);
    if fb == 0.0 {
        return b;
    }
    for _ in 0..2200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

/// Safeguarded Newton iteration for an increasing `f` with `f(a) ≤ 0 ≤ f(b)`.
///
/// Newton steps are taken when they land strictly inside the current bracket;
/// otherwise the bracket is bisected. Returns `Err(y)` if the derivative is
/// negative at some iterate `y`.
pub fn newton_increasing<F, D>(f: F, df: D, mut a: f64, mut b: f64) -> Result<f64, f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut y = 0.5 * (a + b);
    for _ in 0..400 {
        let fy = f(y);
        if fy == 0.0 {
            return Ok(y);
        }
        if fy < 0.0 {
            a = y;
        } else {
            b = y;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return Ok(if f(a).abs() <= f(b).abs() { a } else { b });
        }
        let d = df(y);
        if d < 0.0 && d.is_finite() {
            return Err(y);
        }
        let step = fy / d;
        let cand = y - step;
        y = if d > 0.0 && cand.is_finite() && cand > a && cand < b {
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + y.abs()) {
                return Ok(cand);
            }
            cand
        } else {
            m
        };
    }
    Ok(y)
}
