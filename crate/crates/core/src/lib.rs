//! Continuous involutions of real intervals.
//!
//! The crate builds and checks decreasing involutions `h` of open intervals
//! (`h∘h = id`, `h(0) = 0`) and uses them in three applications:
//!
//! * [`construct`]: the correspondence between involutions and even
//!   functions, and involutions traced from symmetric implicit equations;
//! * [`isochrony`]: isochronous potentials `V = ω²/8·(x − h(x))²`, period
//!   measurement and the derivative conditions at the center;
//! * [`centralforce`] and [`fde`]: a stability test for a planar
//!   central-force system and the functional-differential equation
//!   `y'(t) = a·y(h(t))`.

pub mod centralforce;
pub mod construct;
pub mod error;
pub mod fd;
pub mod fde;
pub mod function;
pub mod interp;
pub mod interval;
pub mod involution;
pub mod isochrony;
pub mod ode;
pub mod presets;
pub mod quadrature;
pub mod roots;
pub mod suite;

pub use error::{Error, Result};
pub use function::RealFunction;
pub use interval::Interval;
pub use involution::{Involution, Tolerance, VerificationReport};
