//! Numerical laboratory for the Aharonov–Bohm solenoid phase.
//!
//! The phase acquired by a charge circling an ideal solenoid is computed four
//! ways: from the vector potential, from the momentum of interference between
//! the charge's electric field and the solenoid field, from the energy of
//! interference, and from the hidden momentum of the solenoid's magnetic
//! moment elements. Everything is in Gaussian units; the default "desk units"
//! set q = c = hbar = 1.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod phase;
pub mod quadrature;
pub mod scenario;
pub mod vec3;

pub use error::{Error, Result};
pub use geometry::{PointCharge, SolenoidSpec, UnitSystem};
pub use phase::{CircularTrajectory, Method, PhaseReport};
pub use quadrature::{IntegralResult, QuadratureConfig};
pub use scenario::Scenario;
pub use vec3::Vec3;
