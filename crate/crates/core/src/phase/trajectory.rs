use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SolenoidSpec, UnitSystem, DEFAULT_BETA_CEILING};
use crate::vec3::Vec3;

/// Minimum loop radius as a multiple of the solenoid radius.
pub const CLEARANCE_FACTOR: f64 = 1.05;

/// Uniform circular motion about the solenoid axis in the plane z = z0.
///
/// `windings` is signed: positive is counterclockwise about +z.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircularTrajectory {
    pub rho0: f64,
    pub speed: f64,
    #[serde(default)]
    pub z0: f64,
    pub windings: i32,
    /// Polar angle of the starting point.
    #[serde(default)]
    pub phase_origin: f64,
}

impl CircularTrajectory {
    pub fn new(rho0: f64, speed: f64, windings: i32) -> Self {
        Self { rho0, speed, z0: 0.0, windings, phase_origin: 0.0 }
    }

    pub fn with_z0(mut self, z0: f64) -> Self {
        self.z0 = z0;
        self
    }

    /// Check the trajectory against the solenoid it encircles.
    pub fn validate(&self, sol: &SolenoidSpec, units: &UnitSystem) -> Result<()> {
        if !(self.rho0.is_finite() && self.speed.is_finite() && self.z0.is_finite() && self.phase_origin.is_finite()) {
            return Err(Error::invalid("trajectory has non-finite parameters"));
        }
        if self.rho0 < CLEARANCE_FACTOR * sol.radius {
            return Err(Error::invalid(format!(
                "rho0 < {CLEARANCE_FACTOR} R (rho0 = {}, R = {})",
                self.rho0, sol.radius
            )));
        }
        if self.speed < 0.0 {
            return Err(Error::invalid(format!("speed must be nonnegative, got {}", self.speed)));
        }
        if self.speed / units.c >= DEFAULT_BETA_CEILING {
            return Err(Error::invalid(format!(
                "speed/c < {DEFAULT_BETA_CEILING} violated (speed/c = {})",
                self.speed / units.c
            )));
        }
        if self.windings == 0 {
            return Err(Error::invalid("windings must be a nonzero integer"));
        }
        Ok(())
    }

    /// Signed angular velocity sign(k) speed / rho0.
    pub fn omega(&self) -> f64 {
        f64::from(self.windings.signum()) * self.speed / self.rho0
    }

    /// Time for one winding, 2 pi rho0 / speed.
    pub fn period(&self) -> f64 {
        2.0 * PI * self.rho0 / self.speed
    }

    pub fn duration(&self) -> f64 {
        f64::from(self.windings.unsigned_abs()) * self.period()
    }

    pub fn angle(&self, t: f64) -> f64 {
        self.phase_origin + self.omega() * t
    }

    pub fn position(&self, t: f64) -> Vec3 {
        let (s, c) = self.angle(t).sin_cos();
        Vec3::new(self.rho0 * c, self.rho0 * s, self.z0)
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        let (s, c) = self.angle(t).sin_cos();
        let w = self.rho0 * self.omega();
        Vec3::new(-w * s, w * c, 0.0)
    }
}
