//! Deterministic adaptive integration over the solenoid cylinder and over
//! closed circular trajectories.
//!
//! Volume integrals use tensor-product Gauss–Kronrod (3-point Gauss nested
//! in 7-point Kronrod) cells in cylindrical coordinates, refined in rounds.
//! Each round picks cells by a total order on (error, index) and evaluates
//! the children in parallel; every reduction walks the cell list in storage
//! order, so results do not depend on the number of worker threads.

mod cubature;
mod cylinder;
mod path;
pub mod rules;

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::vec3::Vec3;

pub use cylinder::{
    cross_section_integral, integrate_cylinder_fixed, integrate_solenoid_volume, tail_bound_from_samples,
    tail_estimate, TailEstimate, TailRefused,
};
pub use path::integrate_loop;

/// Value types that can be integrated: scalars and 3-vectors.
pub trait Quantity:
    Copy + Default + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
    /// Component-wise absolute value.
    fn abs(&self) -> Self;
    fn is_finite(&self) -> bool;
    /// Every component equal to `x`.
    fn splat(x: f64) -> Self;
}

impl Quantity for f64 {
    fn magnitude(&self) -> f64 {
        f64::abs(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn splat(x: f64) -> Self {
        x
    }
}

impl Quantity for Vec3 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn abs(&self) -> Self {
        Vec3::abs(*self)
    }
    fn is_finite(&self) -> bool {
        Vec3::is_finite(*self)
    }
    fn splat(x: f64) -> Self {
        Vec3::new(x, x, x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "defaults::rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "defaults::abs_tol")]
    pub abs_tol: f64,
    /// Initial axial half-extent Z0 of the truncated cylinder, in units of R.
    #[serde(default = "defaults::z_half_extent_initial")]
    pub z_half_extent_initial: f64,
    /// Maximum bisection depth of a volume cell, maximum number of panel
    /// doublings on a loop, and maximum number of Z doublings.
    #[serde(default = "defaults::max_refinement_depth")]
    pub max_refinement_depth: u32,
    /// Z doubling stops once the tail bound is at most this fraction of the
    /// error target max(rel_tol |value|, abs_tol).
    #[serde(default = "defaults::tail_fraction")]
    pub tail_fraction: f64,
    #[serde(default = "defaults::max_evaluations")]
    pub max_evaluations: u64,
    /// Worker threads for cell evaluation; 0 uses the global pool.
    #[serde(skip)]
    pub workers: usize,
}

mod defaults {
    pub fn rel_tol() -> f64 {
        1e-6
    }
    pub fn abs_tol() -> f64 {
        1e-12
    }
    pub fn z_half_extent_initial() -> f64 {
        16.0
    }
    pub fn max_refinement_depth() -> u32 {
        24
    }
    pub fn tail_fraction() -> f64 {
        0.1
    }
    pub fn max_evaluations() -> u64 {
        400_000_000
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: defaults::rel_tol(),
            abs_tol: defaults::abs_tol(),
            z_half_extent_initial: defaults::z_half_extent_initial(),
            max_refinement_depth: defaults::max_refinement_depth(),
            tail_fraction: defaults::tail_fraction(),
            max_evaluations: defaults::max_evaluations(),
            workers: 0,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("quadrature.{name} must be positive, got {v}")))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("z_half_extent_initial", self.z_half_extent_initial)?;
        positive("tail_fraction", self.tail_fraction)?;
        if self.tail_fraction >= 1.0 {
            return Err(Error::invalid("quadrature.tail_fraction must be below 1"));
        }
        if self.max_refinement_depth < 1 {
            return Err(Error::invalid("quadrature.max_refinement_depth must be at least 1"));
        }
        if self.max_evaluations == 0 {
            return Err(Error::invalid("quadrature.max_evaluations must be positive"));
        }
        Ok(())
    }

    /// Error target for a running value.
    pub fn target(&self, value_magnitude: f64) -> f64 {
        (self.rel_tol * value_magnitude).max(self.abs_tol)
    }

    /// Run `op` on a pool with the configured number of workers.
    pub(crate) fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        if self.workers == 0 {
            return op();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.workers).build() {
            Ok(pool) => pool.install(op),
            Err(e) => {
                log::warn!("could not build a {}-thread pool ({e}); using the global pool", self.workers);
                op()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegralResult<T> {
    pub value: T,
    /// Component-wise, nonnegative.
    pub error_estimate: T,
    pub evaluations: u64,
    /// Axial half-extent of the truncated cylinder; zero for loop integrals.
    pub z_extent_used: f64,
}

impl<T: Quantity> IntegralResult<T> {
    pub fn error_magnitude(&self) -> f64 {
        self.error_estimate.magnitude()
    }
}

#[derive(Clone, Debug, Error)]
pub enum QuadratureError<T: Debug> {
    #[error("tolerance not reached: {reason} (best value {:?}, error {:?})", best.value, best.error_estimate)]
    NotConverged { best: IntegralResult<T>, target: f64, reason: String },
    #[error("invalid integration domain: {0}")]
    Domain(String),
}

impl<T: Quantity> QuadratureError<T> {
    pub fn into_error(self, what: &str) -> Error {
        match self {
            QuadratureError::NotConverged { best, target, reason } => Error::NotConverged {
                what: what.to_string(),
                best_value: best.value.magnitude(),
                achieved_error: best.error_magnitude(),
                target,
                reason,
            },
            QuadratureError::Domain(msg) => Error::invalid(format!("{what}: {msg}")),
        }
    }
}
