use thiserror::Error;

use crate::interval::Interval;

/// Errors produced by the numeric kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval ({lo}, {hi})")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("{x} lies outside the domain {domain}")]
    OutsideDomain { x: f64, domain: Interval },

    #[error("evaluation at {x} produced a non-finite value")]
    NonFinite { x: f64 },

    #[error("h({x}) = {hx} does not lie in {domain}")]
    NotSelfMap { x: f64, hx: f64, domain: Interval },

    #[error("no sign change found while bracketing {what}")]
    NoBracket { what: String },

    #[error("monotonicity violated near {at}")]
    NonMonotone { at: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("function is not even: |P({y}) - P(-{y})| = {residual}")]
    NotEven { y: f64, residual: f64 },

    #[error("P(0) = {0}, expected 0")]
    NonzeroAtOrigin(f64),

    #[error("the partial derivative in y vanishes at the origin")]
    DegenerateOrigin,

    #[error("equation is not symmetric: |f(x,y) - f(y,x)| = {residual} at ({x}, {y})")]
    Asymmetric { x: f64, y: f64, residual: f64 },

    #[error("energy {energy} does not fit in the well (bound {bound})")]
    EnergyTooLarge { energy: f64, bound: f64 },

    #[error("quadrature did not converge (error estimate {0:e})")]
    Quadrature(f64),

    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),

    #[error("integration stopped at t = {0} near the coefficient singularity")]
    Singular(f64),

    #[error("not a center: V''(0) = {0}")]
    NotACenter(f64),

    #[error("inversion failed at {attempted}: {reason}")]
    Inversion { attempted: f64, reason: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
