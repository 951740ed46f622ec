//! The four routes to the loop phase.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::momentum::{field_momentum, hidden_momentum_total, interference_energy};
use super::CircularTrajectory;
use crate::error::{Error, Result};
use crate::geometry::{vector_potential, PointCharge, SolenoidSpec, UnitSystem};
use crate::quadrature::{integrate_loop, IntegralResult, QuadratureConfig};
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AbVectorPotential,
    FieldMomentum,
    InterferenceEnergy,
    HiddenMomentum,
}

impl Method {
    pub const ALL: [Method; 4] =
        [Method::AbVectorPotential, Method::FieldMomentum, Method::InterferenceEnergy, Method::HiddenMomentum];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::AbVectorPotential => "ab_vector_potential",
            Method::FieldMomentum => "field_momentum",
            Method::InterferenceEnergy => "interference_energy",
            Method::HiddenMomentum => "hidden_momentum",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown phase method '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseReport {
    pub method: Method,
    /// Signed phase in radians.
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    /// Axial half-extent of the volume integral; zero for the potential route.
    pub z_extent: f64,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// How a loop phase that needs a volume integral per path point is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PathStrategy {
    /// One volume integral at the starting point, rotated along the circle.
    #[default]
    SymmetryReduced,
    /// A full volume integral at every loop quadrature node.
    PerNode,
}

fn charge_at(traj: &CircularTrajectory, t: f64, units: &UnitSystem) -> Result<PointCharge> {
    PointCharge::new(units.charge, traj.position(t), traj.velocity(t), units)
}

fn path_length(traj: &CircularTrajectory) -> f64 {
    2.0 * PI * traj.rho0 * f64::from(traj.windings.unsigned_abs())
}

fn prepare(traj: &CircularTrajectory, sol: &SolenoidSpec, cfg: &QuadratureConfig, units: &UnitSystem) -> Result<()> {
    units.validate()?;
    sol.validate()?;
    cfg.validate()?;
    traj.validate(sol, units)?;
    if traj.speed == 0.0 {
        return Err(Error::invalid("loop phases need a moving charge (speed > 0)"));
    }
    Ok(())
}

/// AB phase (q / c hbar) times the loop integral of A . dr.
pub fn phase_ab(
    traj: &CircularTrajectory,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
) -> Result<PhaseReport> {
    prepare(traj, sol, cfg, units)?;
    let start = Instant::now();
    let factor = units.phase_per_flux();
    let r = integrate_loop(|p, v, _| vector_potential(sol, p).dot(v), traj, cfg)
        .map_err(|e| e.into_error("vector potential loop integral"))?;
    Ok(PhaseReport {
        method: Method::AbVectorPotential,
        value: factor * r.value,
        error_estimate: factor.abs() * r.error_estimate,
        evaluations: r.evaluations,
        z_extent: 0.0,
        wall_time: start.elapsed(),
    })
}

/// Loop integral (1/hbar) of P(r(t)) . v(t) dt for a momentum field P
/// given by a volume integral at each point.
fn momentum_phase<M>(
    method: Method,
    traj: &CircularTrajectory,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
    strategy: PathStrategy,
    momentum: M,
) -> Result<PhaseReport>
where
    M: Fn(&PointCharge) -> Result<IntegralResult<Vec3>> + Sync,
{
    prepare(traj, sol, cfg, units)?;
    let start = Instant::now();
    let inv_hbar = 1.0 / units.hbar;
    match strategy {
        PathStrategy::SymmetryReduced => {
            let p0 = momentum(&charge_at(traj, 0.0, units)?)?;
            let base_angle = traj.angle(0.0);
            let lp = integrate_loop(|_, v, t| p0.value.rotate_z(traj.angle(t) - base_angle).dot(v), traj, cfg)
                .map_err(|e| e.into_error("momentum loop integral"))?;
            let propagated = p0.error_magnitude() * path_length(traj);
            Ok(PhaseReport {
                method,
                value: lp.value * inv_hbar,
                error_estimate: (lp.error_estimate + propagated) * inv_hbar,
                evaluations: lp.evaluations + p0.evaluations,
                z_extent: p0.z_extent_used,
                wall_time: start.elapsed(),
            })
        }
        PathStrategy::PerNode => {
            let tracker = NodeTracker::default();
            let lp = integrate_loop(
                |p, v, _| {
                    let charge = match PointCharge::new(units.charge, p, v, units) {
                        Ok(c) => c,
                        Err(e) => return tracker.fail(e),
                    };
                    match momentum(&charge) {
                        Ok(r) => {
                            tracker.record(r.error_magnitude(), r.evaluations, r.z_extent_used);
                            r.value.dot(v)
                        }
                        Err(e) => tracker.fail(e),
                    }
                },
                traj,
                cfg,
            );
            let node = tracker.finish()?;
            let lp = lp.map_err(|e| e.into_error("momentum loop integral"))?;
            Ok(PhaseReport {
                method,
                value: lp.value * inv_hbar,
                error_estimate: (lp.error_estimate + node.max_error * path_length(traj)) * inv_hbar,
                evaluations: lp.evaluations + node.evaluations,
                z_extent: node.z_extent,
                wall_time: start.elapsed(),
            })
        }
    }
}

#[derive(Default)]
struct NodeStats {
    max_error: f64,
    evaluations: u64,
    z_extent: f64,
    failure: Option<Error>,
}

#[derive(Default)]
struct NodeTracker(Mutex<NodeStats>);

impl NodeTracker {
    fn record(&self, error: f64, evaluations: u64, z_extent: f64) {
        let mut s = self.0.lock().unwrap_or_else(|p| p.into_inner());
        s.max_error = s.max_error.max(error);
        s.evaluations += evaluations;
        s.z_extent = s.z_extent.max(z_extent);
    }

    fn fail(&self, e: Error) -> f64 {
        let mut s = self.0.lock().unwrap_or_else(|p| p.into_inner());
        s.failure.get_or_insert(e);
        f64::NAN
    }

    fn finish(self) -> Result<NodeStats> {
        let mut s = self.0.into_inner().unwrap_or_else(|p| p.into_inner());
        match s.failure.take() {
            Some(e) => Err(e),
            None => Ok(s),
        }
    }
}

/// Phase from the loop integral of the interference momentum.
pub fn phase_field_momentum(
    traj: &CircularTrajectory,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
) -> Result<PhaseReport> {
    phase_field_momentum_with(traj, sol, cfg, units, PathStrategy::SymmetryReduced)
}

pub fn phase_field_momentum_with(
    traj: &CircularTrajectory,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
    strategy: PathStrategy,
) -> Result<PhaseReport> {
    momentum_phase(Method::FieldMomentum, traj, sol, cfg, units, strategy, |c| field_momentum(sol, c, cfg, units))
}

/// Phase from the loop integral of the hidden momentum.
pub fn phase_hidden_momentum(
    traj: &CircularTrajectory,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
) -> Result<PhaseReport> {
    phase_hidden_momentum_with(traj, sol, cfg, units, PathStrategy::SymmetryReduced)
}

pub fn phase_hidden_momentum_with(
    traj: &CircularTrajectory,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
    strategy: PathStrategy,
) -> Result<PhaseReport> {
    momentum_phase(Method::HiddenMomentum, traj, sol, cfg, units, strategy, |c| {
        hidden_momentum_total(sol, c, cfg, units)
    })
}

/// Phase (1/hbar) times the time integral of the interference energy.
pub fn phase_interference_energy(
    traj: &CircularTrajectory,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
) -> Result<PhaseReport> {
    phase_interference_energy_with(traj, sol, cfg, units, PathStrategy::SymmetryReduced)
}

pub fn phase_interference_energy_with(
    traj: &CircularTrajectory,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
    strategy: PathStrategy,
) -> Result<PhaseReport> {
    prepare(traj, sol, cfg, units)?;
    let start = Instant::now();
    let inv_hbar = 1.0 / units.hbar;
    match strategy {
        PathStrategy::SymmetryReduced => {
            // rotating both position and velocity leaves the energy unchanged
            let u0 = interference_energy(sol, &charge_at(traj, 0.0, units)?, cfg, units)?;
            let lp = integrate_loop(|_, _, _| u0.value, traj, cfg).map_err(|e| e.into_error("energy time integral"))?;
            Ok(PhaseReport {
                method: Method::InterferenceEnergy,
                value: lp.value * inv_hbar,
                error_estimate: (lp.error_estimate + u0.error_estimate * traj.duration()) * inv_hbar,
                evaluations: lp.evaluations + u0.evaluations,
                z_extent: u0.z_extent_used,
                wall_time: start.elapsed(),
            })
        }
        PathStrategy::PerNode => {
            let tracker = NodeTracker::default();
            let lp = integrate_loop(
                |p, v, _| {
                    let charge = match PointCharge::new(units.charge, p, v, units) {
                        Ok(c) => c,
                        Err(e) => return tracker.fail(e),
                    };
                    match interference_energy(sol, &charge, cfg, units) {
                        Ok(r) => {
                            tracker.record(r.error_estimate, r.evaluations, r.z_extent_used);
                            r.value
                        }
                        Err(e) => tracker.fail(e),
                    }
                },
                traj,
                cfg,
            );
            let node = tracker.finish()?;
            let lp = lp.map_err(|e| e.into_error("energy time integral"))?;
            Ok(PhaseReport {
                method: Method::InterferenceEnergy,
                value: lp.value * inv_hbar,
                error_estimate: (lp.error_estimate + node.max_error * traj.duration()) * inv_hbar,
                evaluations: lp.evaluations + node.evaluations,
                z_extent: node.z_extent,
                wall_time: start.elapsed(),
            })
        }
    }
}

pub fn compute_phase(
    method: Method,
    traj: &CircularTrajectory,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
) -> Result<PhaseReport> {
    match method {
        Method::AbVectorPotential => phase_ab(traj, sol, cfg, units),
        Method::FieldMomentum => phase_field_momentum(traj, sol, cfg, units),
        Method::InterferenceEnergy => phase_interference_energy(traj, sol, cfg, units),
        Method::HiddenMomentum => phase_hidden_momentum(traj, sol, cfg, units),
    }
}
