//! ODE integrators: an adaptive Dormand–Prince 5(4) pair and the
//! Störmer–Verlet leapfrog for `ẍ = a(x)`.

use crate::error::{Error, Result};
use crate::interp::hermite;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights; the seventh stage is the FSAL derivative.
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Fifth minus fourth order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Accepted steps before giving up.
pub const MAX_STEPS: usize = 5_000_000;

/// One accepted step, enough for cubic Hermite interpolation inside it.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub y0: [f64; N],
    pub f0: [f64; N],
    pub t1: f64,
    pub y1: [f64; N],
    pub f1: [f64; N],
    /// Scaled error norm of the step (≤ 1 when accepted).
    pub error: f64,
}

impl<const N: usize> Step<N> {
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = hermite(self.t0, self.y0[i], self.f0[i], self.t1, self.y1[i], self.f1[i], t);
        }
        out
    }
}

/// Adaptive Dormand–Prince integrator with standard step control
/// (safety 0.9, growth clamped to `[0.2, 5]`). Works forward or backward in
/// time; the direction is fixed by the first target.
pub struct Dopri5<const N: usize, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    f: F,
    t: f64,
    y: [f64; N],
    dy: [f64; N],
    h: f64,
    rtol: f64,
    atol: f64,
    steps: usize,
    rejected: usize,
}

impl<const N: usize, F> Dopri5<N, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], rtol: f64, atol: f64) -> Self {
        let dy = f(t0, &y0);
        Self {
            f,
            t: t0,
            y: y0,
            dy,
            h: 0.0,
            rtol,
            atol,
            steps: 0,
            rejected: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; N] {
        self.y
    }

    pub fn derivative(&self) -> [f64; N] {
        self.dy
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn rejected(&self) -> usize {
        self.rejected
    }

    fn norm(&self, err: &[f64; N], y0: &[f64; N], y1: &[f64; N]) -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            let sc = self.atol + self.rtol * y0[i].abs().max(y1[i].abs());
            s += (err[i] / sc).powi(2);
        }
        (s / N as f64).sqrt()
    }

    fn initial_step(&mut self, direction: f64) -> f64 {
        let zero = [0.0; N];
        let d0 = self.norm(&self.y, &zero, &self.y);
        let d1 = self.norm(&self.dy, &zero, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let mut y1 = self.y;
        for (y, dy) in y1.iter_mut().zip(&self.dy) {
            *y += direction * h0 * dy;
        }
        let f1 = (self.f)(self.t + direction * h0, &y1);
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - self.dy[i];
        }
        let d2 = self.norm(&diff, &zero, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }

    /// Takes one accepted step toward `t_limit` without passing it.
    pub fn step(&mut self, t_limit: f64) -> Result<Step<N>> {
        let span = t_limit - self.t;
        if span == 0.0 {
            return Err(Error::InvalidParameter("step toward the current time".into()));
        }
        let direction = span.signum();
        if self.h == 0.0 || self.h.signum() != direction {
            self.h = direction * self.initial_step(direction);
        }
        if self.steps >= MAX_STEPS {
            return Err(Error::StepUnderflow(self.t));
        }
        loop {
            let mut h = self.h;
            let last = h.abs() >= span.abs();
            if last {
                h = span;
            }
            if h.abs() < 1e-14 * (1.0 + self.t.abs()) && !last {
                return Err(Error::StepUnderflow(self.t));
            }
            let mut k = [[0.0; N]; 7];
            k[0] = self.dy;
            for s in 1..7 {
                let mut ys = self.y;
                for i in 0..N {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += A[s][j] * kj[i];
                    }
                    ys[i] += h * acc;
                }
                let ts = if s >= 5 { self.t + h } else { self.t + C[s] * h };
                k[s] = (self.f)(ts, &ys);
            }
            let mut y1 = self.y;
            let mut err = [0.0; N];
            for i in 0..N {
                let mut acc = 0.0;
                let mut e = 0.0;
                for s in 0..7 {
                    acc += B[s] * k[s][i];
                    e += E[s] * k[s][i];
                }
                y1[i] += h * acc;
                err[i] = h * e;
            }
            let en = self.norm(&err, &self.y, &y1);
            let finite = y1.iter().all(|v| v.is_finite()) && en.is_finite();
            if finite && en <= 1.0 {
                let factor = if en == 0.0 {
                    5.0
                } else {
                    (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
                };
                let t1 = if last { t_limit } else { self.t + h };
                let step = Step {
                    t0: self.t,
                    y0: self.y,
                    f0: self.dy,
                    t1,
                    y1,
                    f1: k[6],
                    error: en,
                };
                self.t = t1;
                self.y = y1;
                self.dy = k[6];
                self.steps += 1;
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
                return Ok(step);
            }
            self.rejected += 1;
            let factor = if finite {
                (0.9 * en.powf(-0.2)).clamp(0.2, 1.0)
            } else {
                0.2
            };
            self.h = h * factor;
        }
    }

    /// Integrates to exactly `t`, returning the state there.
    pub fn advance_to(&mut self, t: f64) -> Result<[f64; N]> {
        while self.t != t {
            self.step(t)?;
        }
        Ok(self.y)
    }
}

/// Kick–drift–kick Störmer–Verlet step for `ẍ = accel(x)`.
pub fn verlet_step<A: Fn(f64) -> f64>(accel: &A, x: f64, v: f64, dt: f64) -> (f64, f64) {
    let v_half = v + 0.5 * dt * accel(x);
    let x1 = x + dt * v_half;
    let v1 = v_half + 0.5 * dt * accel(x1);
    (x1, v1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_order_conditions() {
        for (s, row) in A.iter().enumerate().take(6) {
            let sum: f64 = row.iter().sum();
            assert!((sum - C[s]).abs() < 1e-15, "row {s}");
        }
        let b4: Vec<f64> = B.iter().zip(E.iter()).map(|(b, e)| b - e).collect();
        for w in [&B[..], &b4[..]] {
            let q1: f64 = w.iter().sum();
            let q2: f64 = w.iter().zip(C.iter()).map(|(b, c)| b * c).sum();
            let q3: f64 = w.iter().zip(C.iter()).map(|(b, c)| b * c * c).sum();
            let q4: f64 = w.iter().zip(C.iter()).map(|(b, c)| b * c * c * c).sum();
            assert!((q1 - 1.0).abs() < 1e-15);
            assert!((q2 - 0.5).abs() < 1e-15);
            assert!((q3 - 1.0 / 3.0).abs() < 1e-15);
            assert!((q4 - 0.25).abs() < 1e-15);
        }
        let q5: f64 = B.iter().zip(C.iter()).map(|(b, c)| b * c.powi(4)).sum();
        assert!((q5 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn harmonic_oscillator_full_period() {
        let mut s = Dopri5::new(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 1e-12, 1e-14);
        let y = s.advance_to(2.0 * std::f64::consts::PI).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        let mut s = Dopri5::new(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1e-12, 1e-14);
        let y = s.advance_to(-2.0).unwrap();
        assert!((y[0] - (-2f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn blow_up_reports_underflow() {
        let mut s = Dopri5::new(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 1e-10, 1e-12);
        assert!(s.advance_to(2.0).is_err());
    }

    #[test]
    fn step_interpolation_matches_solution() {
        let mut s = Dopri5::new(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1e-12, 1e-14);
        let st = s.step(0.1).unwrap();
        let tm = 0.5 * (st.t0 + st.t1);
        assert!((st.interpolate(tm)[0] - tm.exp()).abs() < 1e-9);
    }

    #[test]
    fn verlet_is_time_reversible() {
        let acc = |x: f64| -x - x * x * x;
        let (x1, v1) = verlet_step(&acc, 0.3, 0.1, 0.01);
        let (x0, v0) = verlet_step(&acc, x1, -v1, 0.01);
        assert!((x0 - 0.3).abs() < 1e-15 && (v0 + 0.1).abs() < 1e-15);
    }
}
