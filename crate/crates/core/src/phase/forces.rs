//! The two opposing forces the moving charge exerts on the solenoid.

use serde::Serialize;

use super::CircularTrajectory;
use crate::error::Result;
use crate::geometry::{vector_potential, vector_potential_jacobian, SolenoidSpec, UnitSystem};
use crate::vec3::Vec3;

/// Central-difference step as a fraction of the winding period.
pub const FD_STEP_FRACTION: f64 = 1e-4;
/// Relative residual above which the finite-difference cross-check warns.
pub const FD_WARN_RESIDUAL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForceReport {
    pub time: f64,
    /// Analytic chain-rule value.
    pub value: Vec3,
    /// Central finite-difference value.
    pub finite_difference: Vec3,
    /// |value - finite_difference| / |value|, or the absolute difference when
    /// the analytic value is zero.
    pub residual: f64,
}

/// d/dt of (q/c) A(r(t)) by the chain rule, J(r) v.
fn potential_rate(traj: &CircularTrajectory, sol: &SolenoidSpec, t: f64, units: &UnitSystem) -> Vec3 {
    let j = vector_potential_jacobian(sol, traj.position(t));
    let v = traj.velocity(t);
    let jv = Vec3::new(
        j[0][0] * v.x + j[0][1] * v.y + j[0][2] * v.z,
        j[1][0] * v.x + j[1][1] * v.y + j[1][2] * v.z,
        j[2][0] * v.x + j[2][1] * v.y + j[2][2] * v.z,
    );
    jv * (units.charge / units.c)
}

fn potential_rate_fd(traj: &CircularTrajectory, sol: &SolenoidSpec, t: f64, units: &UnitSystem) -> Vec3 {
    if traj.speed == 0.0 {
        return Vec3::ZERO;
    }
    let h = FD_STEP_FRACTION * traj.period();
    let a = |s: f64| vector_potential(sol, traj.position(s));
    (a(t + h) - a(t - h)) * (units.charge / (units.c * 2.0 * h))
}

fn report(value: Vec3, finite_difference: Vec3, t: f64) -> ForceReport {
    let diff = (value - finite_difference).norm();
    let n = value.norm();
    let residual = if n > 0.0 { diff / n } else { diff };
    if residual > FD_WARN_RESIDUAL {
        log::warn!("finite-difference cross-check of the potential force at t={t}: residual {residual:e}");
    }
    ForceReport { time: t, value, finite_difference, residual }
}

/// Force on the solenoid currents, -(d/dt)(q A / c) along the trajectory.
pub fn force_on_currents(
    traj: &CircularTrajectory,
    sol: &SolenoidSpec,
    t: f64,
    units: &UnitSystem,
) -> Result<ForceReport> {
    units.validate()?;
    traj.validate(sol, units)?;
    let value = -potential_rate(traj, sol, t, units);
    Ok(report(value, -potential_rate_fd(traj, sol, t, units), t))
}

/// Force from the rate of change of hidden momentum, +(d/dt)(q A / c).
pub fn hidden_force(traj: &CircularTrajectory, sol: &SolenoidSpec, t: f64, units: &UnitSystem) -> Result<ForceReport> {
    units.validate()?;
    traj.validate(sol, units)?;
    let value = potential_rate(traj, sol, t, units);
    Ok(report(value, potential_rate_fd(traj, sol, t, units), t))
}
