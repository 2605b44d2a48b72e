//! The planar system `ẍ = −x·f(x)`, `ÿ = −y·f(x)` with `f(0) = 1`.
//!
//! The `x` equation is autonomous with potential `V(x) = ∫₀ˣ s·f(s) ds`, and
//! the force is central, so `E_x = ½ẋ² + V(x)` and `L = x·ẏ − y·ẋ` are
//! conserved. The origin is Lyapunov stable exactly when
//! `1/V(x) = ½(1/x − 1/h(x))²` near 0, `h` being the level pairing of `V`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::involution::Involution;
use crate::isochrony::{involution_from_potential, Potential};
use crate::ode::Dopri5;
use crate::quadrature;
use crate::RealFunction;

/// Normalized residual below which the stability identity counts as exact.
pub const STABILITY_TOL: f64 = 1e-8;
/// Default number of well samples for the stability test.
pub const STABILITY_SAMPLES: usize = 64;
/// Tolerance of the quadrature producing `V` from `f`.
pub const POTENTIAL_QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CentralForceSystem {
    name: String,
    f: RealFunction,
    potential: Potential,
    h: Involution,
}

impl CentralForceSystem {
    /// `v = None` integrates `s·f(s)` from 0 numerically.
    pub fn new(name: impl Into<String>, f: RealFunction, v: Option<RealFunction>) -> Result<Self> {
        let name = name.into();
        let f0 = f.eval(0.0)?;
        if (f0 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("f(0) must be 1, got {f0}")));
        }
        let domain = f.domain();
        let v = match v {
            Some(v) => v,
            None => {
                let fq = f.clone();
                RealFunction::new(domain, move |x| {
                    quadrature::integrate(|s| s * fq.call(s), 0.0, x, 1e-300, POTENTIAL_QUAD_TOL)
                        .map(|r| r.value)
                        .unwrap_or(f64::NAN)
                })
            }
        };
        let fg = f.clone();
        let g = RealFunction::new(domain, move |x| x * fg.call(x));
        let potential = Potential::new(name.clone(), v, g, Some(1.0))?;
        let h = involution_from_potential(&potential)?;
        Ok(Self { name, f, potential, h })
    }

    /// Checks `f(x) = f(−x)` and `V(x) = V(−x)` on a sample grid.
    pub fn check_even(&self) -> Result<()> {
        let d = self.f.domain();
        let r = d.hi().min(-d.lo());
        let grid = Interval::symmetric(r)?.sample_interior(101);
        for x in grid.into_iter().filter(|&x| x > 0.0) {
            let (a, b) = (self.f.call(x), self.f.call(-x));
            if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                return Err(Error::NotEven {
                    y: x,
                    residual: (a - b).abs(),
                });
            }
            let (a, b) = (self.potential.v().call(x), self.potential.v().call(-x));
            if (a - b).abs() > 1e-10 * (1.0 + a.abs()) {
                return Err(Error::NotEven {
                    y: x,
                    residual: (a - b).abs(),
                });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn f(&self) -> &RealFunction {
        &self.f
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn involution(&self) -> &Involution {
        &self.h
    }

    /// Region where the pairing `h` is defined.
    pub fn well(&self) -> Interval {
        self.h.domain()
    }

    pub fn energy_x(&self, x: f64, vx: f64) -> f64 {
        0.5 * vx * vx + self.potential.v().call(x)
    }
}

/// Per-sample residuals `ρ(x) = 1/V(x) − ½(1/x − 1/h(x))²`.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub samples: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `|ρ(x)|·V(x)`, scale free.
    pub normalized: Vec<f64>,
    pub max_normalized: f64,
    pub tolerance: f64,
    pub region: Interval,
    pub stable: bool,
}

/// `n` nonzero interior points of the system's well.
pub fn stability_samples(sys: &CentralForceSystem, n: usize) -> Vec<f64> {
    sys.well()
        .sample_interior(n + 1)
        .into_iter()
        .filter(|&x| x != 0.0)
        .collect()
}

pub fn stability_residual(sys: &CentralForceSystem, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::InvalidParameter("stability samples must be nonzero".into()));
    }
    let well = sys.well();
    if !well.contains(x) {
        return Err(Error::OutsideDomain { x, domain: well });
    }
    let v = sys.potential.v().eval(x)?;
    let hx = sys.h.eval(x)?;
    let d = 1.0 / x - 1.0 / hx;
    Ok(1.0 / v - 0.5 * d * d)
}

/// Stable iff every normalized residual is at most [`STABILITY_TOL`].
pub fn stability_condition(sys: &CentralForceSystem, samples: &[f64]) -> Result<StabilityReport> {
    let mut residuals = Vec::with_capacity(samples.len());
    let mut normalized = Vec::with_capacity(samples.len());
    for &x in samples {
        let rho = stability_residual(sys, x)?;
        residuals.push(rho);
        normalized.push(rho.abs() * sys.potential.v().call(x));
    }
    let max_normalized = normalized.iter().copied().fold(0.0, f64::max);
    Ok(StabilityReport {
        samples: samples.to_vec(),
        residuals,
        normalized,
        max_normalized,
        tolerance: STABILITY_TOL,
        region: sys.well(),
        stable: max_normalized <= STABILITY_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State4 {
    pub t: f64,
    pub x: f64,
    pub vx: f64,
    pub y: f64,
    pub vy: f64,
}

impl State4 {
    pub fn new(x: f64, vx: f64, y: f64, vy: f64) -> Self {
        Self { t: 0.0, x, vx, y, vy }
    }

    pub fn angular_momentum(&self) -> f64 {
        self.x * self.vy - self.y * self.vx
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimulationConfig {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub samples: Vec<State4>,
    /// Largest `|E_x(t) − E_x(0)|` over every accepted step.
    pub energy_drift: f64,
    /// Largest `|L(t) − L(0)|` over every accepted step.
    pub momentum_drift: f64,
    pub initial_energy: f64,
    pub initial_momentum: f64,
    /// Sum of the local error estimates of all steps, in state units.
    pub accumulated_local_error: f64,
    pub steps: usize,
    pub rejected: usize,
}

impl Trajectory {
    /// Samples with `t` in `[t0, t1]`.
    pub fn window(&self, t0: f64, t1: f64) -> Vec<State4> {
        self.samples
            .iter()
            .copied()
            .filter(|s| s.t >= t0 && s.t <= t1)
            .collect()
    }

    pub fn max_radius(&self, t0: f64, t1: f64) -> f64 {
        self.window(t0, t1).iter().map(State4::radius).fold(0.0, f64::max)
    }
}

/// Integrates from `s0` to `t_end`, recording the state every `dt`.
pub fn simulate(
    sys: &CentralForceSystem,
    s0: State4,
    t_end: f64,
    dt: f64,
    cfg: SimulationConfig,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end > s0.t) {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and t_end > t0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let domain = sys.f.domain();
    if !domain.contains(s0.x) {
        return Err(Error::OutsideDomain { x: s0.x, domain });
    }
    let f = sys.f.clone();
    // Trial stages may leave the domain; only accepted steps are checked.
    let rhs = move |_t: f64, s: &[f64; 4]| {
        let fx = f.call(s[0]);
        [s[1], -s[0] * fx, s[3], -s[2] * fx]
    };
    let mut solver = Dopri5::new(rhs, s0.t, [s0.x, s0.vx, s0.y, s0.vy], cfg.rtol, cfg.atol);
    let e0 = sys.energy_x(s0.x, s0.vx);
    let l0 = s0.angular_momentum();
    let mut traj = Trajectory {
        samples: vec![s0],
        energy_drift: 0.0,
        momentum_drift: 0.0,
        initial_energy: e0,
        initial_momentum: l0,
        accumulated_local_error: 0.0,
        steps: 0,
        rejected: 0,
    };
    let n_out = ((t_end - s0.t) / dt).ceil() as usize;
    for i in 1..=n_out {
        let target = (s0.t + i as f64 * dt).min(t_end);
        while solver.t() < target {
            let step = solver.step(target)?;
            let y = step.y1;
            if !domain.contains(y[0]) {
                return Err(Error::OutsideDomain { x: y[0], domain });
            }
            let scale = y
                .iter()
                .zip(&step.y0)
                .map(|(a, b)| a.abs().max(b.abs()))
                .fold(0.0, f64::max);
            traj.accumulated_local_error += step.error * (cfg.atol + cfg.rtol * scale);
            let st = State4 {
                t: step.t1,
                x: y[0],
                vx: y[1],
                y: y[2],
                vy: y[3],
            };
            traj.energy_drift = traj.energy_drift.max((sys.energy_x(st.x, st.vx) - e0).abs());
            traj.momentum_drift = traj.momentum_drift.max((st.angular_momentum() - l0).abs());
        }
        let y = solver.y();
        traj.samples.push(State4 {
            t: target,
            x: y[0],
            vx: y[1],
            y: y[2],
            vy: y[3],
        });
    }
    traj.steps = solver.steps();
    traj.rejected = solver.rejected();
    Ok(traj)
}

/// Windows `[0, 8]`, `[0, 14]` and `[0, 38]` of the orbit of `f = 1 + x²`
/// from `(x, ẋ, y, ẏ) = (0.4, 0, 0, 0.5)`.
#[derive(Debug, Clone, Serialize)]
pub struct Figure5 {
    pub initial: State4,
    pub windows: [(f64, f64); 3],
    pub traces: Vec<Vec<State4>>,
    pub max_radius: [f64; 3],
    /// Largest radius over `[14, 38]` against the largest over `[0, 8]`.
    pub late_max_radius: f64,
    pub radius_grows: bool,
    pub energy_drift: f64,
    pub momentum_drift: f64,
    pub initial_energy: f64,
    pub initial_momentum: f64,
}

pub const FIGURE5_WINDOWS: [(f64, f64); 3] = [(0.0, 8.0), (0.0, 14.0), (0.0, 38.0)];
pub const FIGURE5_DT: f64 = 0.01;

pub fn figure5_system() -> Result<CentralForceSystem> {
    crate::presets::force("one_plus_x2", &[])
}

/// One run to `t = 38` sliced into the three windows.
pub fn figure5_experiment(cfg: SimulationConfig) -> Result<Figure5> {
    let sys = figure5_system()?;
    let s0 = State4::new(0.4, 0.0, 0.0, 0.5);
    let t_end = FIGURE5_WINDOWS[2].1;
    let traj = simulate(&sys, s0, t_end, FIGURE5_DT, cfg)?;
    let traces: Vec<Vec<State4>> = FIGURE5_WINDOWS.iter().map(|&(a, b)| traj.window(a, b)).collect();
    let max_radius = FIGURE5_WINDOWS.map(|(a, b)| traj.max_radius(a, b));
    let late_max_radius = traj.max_radius(14.0, 38.0);
    let radius_grows =
        max_radius[0] < max_radius[1] && max_radius[1] < max_radius[2] && late_max_radius > max_radius[0];
    Ok(Figure5 {
        initial: s0,
        windows: FIGURE5_WINDOWS,
        traces,
        max_radius,
        late_max_radius,
        radius_grows,
        energy_drift: traj.energy_drift,
        momentum_drift: traj.momentum_drift,
        initial_energy: traj.initial_energy,
        initial_momentum: traj.initial_momentum,
    })
}

/// Runs several trajectories, concurrently when `parallel`, in input order.
pub fn simulate_many(
    sys: &CentralForceSystem,
    starts: &[State4],
    t_end: f64,
    dt: f64,
    cfg: SimulationConfig,
    parallel: bool,
) -> Vec<Result<Trajectory>> {
    if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = starts
                .iter()
                .map(|&s0| s.spawn(move || simulate(sys, s0, t_end, dt, cfg)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("trajectory worker panicked"))
                .collect()
        })
    } else {
        starts.iter().map(|&s0| simulate(sys, s0, t_end, dt, cfg)).collect()
    }
}
