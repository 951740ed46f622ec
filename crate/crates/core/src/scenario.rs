//! Scenario files: one TOML document describing units, solenoid, trajectory,
//! quadrature settings and the sample points used by `verify`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{b_from_winding, SolenoidSpec, UnitSystem};
use crate::phase::{CircularTrajectory, CLEARANCE_FACTOR};
use crate::quadrature::QuadratureConfig;
use crate::vec3::Vec3;

/// Desk-units scenario compiled into the binary.
pub const DEFAULT_SCENARIO: &str = include_str!("../scenarios/default.toml");

/// Force checks sample this many evenly spaced times per winding by default.
pub const DEFAULT_FORCE_SAMPLES: usize = 16;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error in {origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("invalid scenario: {field}: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    fn validation(field: &str, message: impl Into<String>) -> Self {
        ScenarioError::Validation { field: field.to_string(), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolenoidSection {
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_interior: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turns_per_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current: Option<f64>,
    #[serde(default)]
    pub shielded: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    /// Charge positions for the momentum identity; default rho in {1.5, 2, 4} R on the x axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_points: Option<Vec<[f64; 3]>>,
    /// Times for the force-balance check; default 16 per winding period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force_times: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub units: UnitSystem,
    pub solenoid: SolenoidSection,
    pub trajectory: CircularTrajectory,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub checks: ChecksSection,
}

impl Scenario {
    pub fn default_desk() -> Self {
        Self::from_toml_str(DEFAULT_SCENARIO, "<built-in default>").expect("built-in scenario is valid")
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = toml::from_str(text)
            .map_err(|e| ScenarioError::Parse { origin: origin.to_string(), message: e.to_string() })?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_toml_string())
    }

    pub fn solenoid(&self) -> SolenoidSpec {
        let s = &self.solenoid;
        let b = match (s.b_interior, s.turns_per_length, s.current) {
            (Some(b), _, _) => b,
            (None, Some(n), Some(i)) => b_from_winding(n, i, &self.units),
            _ => f64::NAN,
        };
        SolenoidSpec { radius: s.radius, b_interior: b, shielded: s.shielded }
    }

    pub fn identity_points(&self) -> Vec<Vec3> {
        match &self.checks.identity_points {
            Some(p) => p.iter().map(|&a| Vec3::from(a)).collect(),
            None => {
                let r = self.solenoid.radius;
                [1.5, 2.0, 4.0].iter().map(|f| Vec3::new(f * r, 0.0, self.trajectory.z0)).collect()
            }
        }
    }

    pub fn force_times(&self) -> Vec<f64> {
        match &self.checks.force_times {
            Some(t) => t.clone(),
            None => {
                let period = if self.trajectory.speed > 0.0 { self.trajectory.period() } else { 1.0 };
                (0..DEFAULT_FORCE_SAMPLES).map(|i| i as f64 * period / DEFAULT_FORCE_SAMPLES as f64).collect()
            }
        }
    }

    /// Check every invariant, naming the offending field.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let wrap = |field: &str| {
            let field = field.to_string();
            move |e: crate::Error| ScenarioError::Validation { field: field.clone(), message: e.to_string() }
        };
        self.units.validate().map_err(wrap("units"))?;
        let s = &self.solenoid;
        match (s.b_interior, s.turns_per_length, s.current) {
            (Some(_), None, None) | (None, Some(_), Some(_)) => {}
            _ => {
                return Err(ScenarioError::validation(
                    "solenoid",
                    "give either b_interior or both turns_per_length and current",
                ))
            }
        }
        self.solenoid().validate().map_err(wrap("solenoid"))?;
        self.trajectory.validate(&self.solenoid(), &self.units).map_err(wrap("trajectory"))?;
        self.quadrature.validate().map_err(wrap("quadrature"))?;
        for (i, p) in self.identity_points().iter().enumerate() {
            if !p.is_finite() || p.rho() < CLEARANCE_FACTOR * s.radius {
                return Err(ScenarioError::validation(
                    &format!("checks.identity_points[{i}]"),
                    format!("point must satisfy rho >= {CLEARANCE_FACTOR} R (rho = {})", p.rho()),
                ));
            }
        }
        if let Some(times) = &self.checks.force_times {
            if let Some(i) = times.iter().position(|t| !t.is_finite()) {
                return Err(ScenarioError::validation(&format!("checks.force_times[{i}]"), "time must be finite"));
            }
        }
        Ok(())
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text =
        fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    Scenario::from_toml_str(&text, &path.display().to_string())
}
