//! Open real intervals with possibly infinite endpoints.
//!
//! Every domain in the crate is an open interval. Infinite endpoints are
//! stored as `f64::INFINITY` / `f64::NEG_INFINITY` and sampling never touches
//! an endpoint: finite ends are approached geometrically, infinite ends are
//! reached through a doubling grid that stops at [`INFINITE_REACH`] times the
//! interval scale.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest multiple of the scale sampled toward an infinite endpoint.
pub const INFINITE_REACH: f64 = 16.0;

/// Closest relative approach to a finite endpoint in sampling grids.
pub const FINITE_APPROACH: f64 = 1.0e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// Which end of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lo,
    Hi,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// The whole real line.
    pub const fn real() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    /// `(-r, r)`; `r` may be infinite.
    pub fn symmetric(r: f64) -> Result<Self> {
        Self::new(-r, r)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn end(&self, side: Side) -> f64 {
        match side {
            Side::Lo => self.lo,
            Side::Hi => self.hi,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn is_symmetric(&self) -> bool {
        self.lo == -self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Reference interior point: the origin when it is inside, otherwise the
    /// midpoint (or a unit step in from the finite end of a half-line).
    pub fn center(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else if self.is_bounded() {
            0.5 * (self.lo + self.hi)
        } else if self.lo.is_finite() {
            self.lo + self.lo.abs().max(1.0)
        } else {
            self.hi - self.hi.abs().max(1.0)
        }
    }

    /// Length scale of the interval seen from [`Interval::center`]: the
    /// distance to the nearest finite endpoint, or 1 on the whole line.
    pub fn scale(&self) -> f64 {
        let c = self.center();
        let d = (c - self.lo).min(self.hi - c);
        if d.is_finite() {
            d
        } else {
            1.0
        }
    }

    pub fn translate(&self, shift: f64) -> Self {
        Self {
            lo: self.lo + shift,
            hi: self.hi + shift,
        }
    }

    /// Image of the interval under `x ↦ x / a`.
    pub fn divide(&self, a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor {a}")));
        }
        if a > 0.0 {
            Self::new(self.lo / a, self.hi / a)
        } else {
            Self::new(self.hi / a, self.lo / a)
        }
    }

    pub fn intersect(&self, other: &Interval) -> Result<Self> {
        Self::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Points walking from `from` toward one end of the interval, never
    /// reaching it. Finite ends are approached as `end - d·2⁻ᵏ`, infinite ends
    /// through `from ± s·2ᵏ`, up to `max_steps` points.
    pub fn approach(&self, from: f64, side: Side, max_steps: usize) -> Vec<f64> {
        let end = self.end(side);
        let sign = match side {
            Side::Lo => -1.0,
            Side::Hi => 1.0,
        };
        let mut out = Vec::new();
        if end.is_finite() {
            let d = (end - from).abs();
            for k in 1..=max_steps {
                let x = end - sign * d * 0.5f64.powi(k as i32);
                if !self.contains(x) || x == end {
                    break;
                }
                if out.last() == Some(&x) {
                    break;
                }
                out.push(x);
            }
        } else {
            let s = self.scale();
            for k in 0..max_steps {
                let x = from + sign * s * 2f64.powi(k as i32);
                if !x.is_finite() {
                    break;
                }
                out.push(x);
            }
        }
        out
    }

    /// Ascending interior sample grid of about `n` points.
    ///
    /// Half of the points on each side of [`Interval::center`] are uniform in
    /// a core region, the other half geometric toward the end: down to a
    /// [`FINITE_APPROACH`] fraction of the distance for finite ends, and up to
    /// [`INFINITE_REACH`] times the scale for infinite ones.
    pub fn sample_interior(&self, n: usize) -> Vec<f64> {
        let n = n.max(3);
        let c = self.center();
        let scale = self.scale();
        let n_left = (n - 1) / 2;
        let n_right = n - 1 - n_left;
        let mut pts = vec![c];
        for (side, m) in [(Side::Lo, n_left), (Side::Hi, n_right)] {
            let sign = if side == Side::Lo { -1.0 } else { 1.0 };
            let dist = (self.end(side) - c).abs();
            let m_uniform = m / 2;
            let m_geom = m - m_uniform;
            if dist.is_finite() {
                for j in 1..=m_uniform {
                    pts.push(c + sign * dist * 0.5 * j as f64 / (m_uniform as f64 + 1.0));
                }
                let kmax = -FINITE_APPROACH.log2();
                for j in 1..=m_geom {
                    let frac = 1.0 - 0.5 * 2f64.powf(-(kmax - 1.0) * j as f64 / m_geom as f64);
                    pts.push(c + sign * dist * frac);
                }
            } else {
                for j in 1..=m_uniform {
                    pts.push(c + sign * scale * j as f64 / (m_uniform as f64 + 1.0));
                }
                let kmax = INFINITE_REACH.log2();
                for j in 1..=m_geom {
                    pts.push(c + sign * scale * 2f64.powf(kmax * j as f64 / m_geom as f64));
                }
            }
        }
        pts.retain(|&x| self.contains(x));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Endpoint encoding for JSON: finite numbers stay numbers, infinities
/// become the strings `"-inf"` / `"inf"`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Finite(f64),
    Named(String),
}

impl Endpoint {
    fn encode(x: f64) -> Self {
        if x.is_finite() {
            Endpoint::Finite(x)
        } else if x > 0.0 {
            Endpoint::Named("inf".into())
        } else {
            Endpoint::Named("-inf".into())
        }
    }

    fn decode(self) -> std::result::Result<f64, String> {
        match self {
            Endpoint::Finite(x) => Ok(x),
            Endpoint::Named(s) => match s.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(format!("bad endpoint `{other}`")),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: Endpoint,
    hi: Endpoint,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr {
            lo: Endpoint::encode(self.lo),
            hi: Endpoint::encode(self.hi),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = IntervalRepr::deserialize(d)?;
        let lo = r.lo.decode().map_err(D::Error::custom)?;
        let hi = r.hi.decode().map_err(D::Error::custom)?;
        Interval::new(lo, hi).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nan() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(f64::INFINITY, f64::INFINITY).is_err());
    }

    #[test]
    fn symmetry() {
        assert!(Interval::symmetric(4.0).unwrap().is_symmetric());
        assert!(Interval::real().is_symmetric());
        assert!(!Interval::new(-1.0, 3.0).unwrap().is_symmetric());
    }

    #[test]
    fn samples_stay_strictly_inside() {
        for iv in [
            Interval::real(),
            Interval::new(-1.0, 3.0).unwrap(),
            Interval::new(-1.0, f64::INFINITY).unwrap(),
            Interval::new(f64::NEG_INFINITY, 2f64.ln()).unwrap(),
            Interval::new(2.0, 5.0).unwrap(),
        ] {
            let s = iv.sample_interior(101);
            assert!(s.len() >= 95, "{iv}: {}", s.len());
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert!(s.iter().all(|&x| iv.contains(x)));
        }
    }

    #[test]
    fn finite_ends_are_approached_closely() {
        let iv = Interval::new(-1.0, 3.0).unwrap();
        let s = iv.sample_interior(200);
        assert!(s[0] + 1.0 < 1e-3);
        assert!(3.0 - s[s.len() - 1] < 1e-3);
    }

    #[test]
    fn divide_swaps_for_negative_factor() {
        let iv = Interval::new(-1.0, f64::INFINITY).unwrap();
        assert_eq!(iv.divide(2.0).unwrap(), Interval::new(-0.5, f64::INFINITY).unwrap());
        assert_eq!(iv.divide(-2.0).unwrap(), Interval::new(f64::NEG_INFINITY, 0.5).unwrap());
        assert!(iv.divide(0.0).is_err());
    }

    #[test]
    fn json_encodes_infinities_as_strings() {
        let iv = Interval::new(f64::NEG_INFINITY, 2f64.ln()).unwrap();
        let s = serde_json::to_string(&iv).unwrap();
        assert!(s.contains("\"-inf\""));
        let back: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, iv);
    }
}
