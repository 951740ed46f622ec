//! Analytic field building blocks for an ideal, infinitely long solenoid and a
//! slowly moving point charge, in Gaussian units.
//!
//! The solenoid axis is the z axis and its interior field points along +z.
//! Points with cylindrical radius exactly `R` are classified as exterior.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Largest |v|/c accepted for a point charge unless a caller widens it.
pub const DEFAULT_BETA_CEILING: f64 = 0.1;

/// Constants that set the scale of every phase: the signed charge of the
/// moving particle, the speed of light, and the reduced Planck constant.
///
/// The default is "desk units", q = c = hbar = 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSystem {
    #[serde(default = "one")]
    pub charge: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::desk()
    }
}

impl UnitSystem {
    pub const fn desk() -> Self {
        Self { charge: 1.0, c: 1.0, hbar: 1.0 }
    }

    /// CGS-Gaussian constants with a physical electron (negative charge).
    pub const fn gaussian_cgs_electron() -> Self {
        Self { charge: -4.803_204_712_570_263e-10, c: 2.997_924_58e10, hbar: 1.054_571_817e-27 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::invalid(format!("units.c must be positive and finite, got {}", self.c)));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::invalid(format!("units.hbar must be positive and finite, got {}", self.hbar)));
        }
        if !self.charge.is_finite() {
            return Err(Error::invalid("units.charge must be finite"));
        }
        Ok(())
    }

    /// q / (c hbar), the factor that turns a flux into a phase.
    pub fn phase_per_flux(&self) -> f64 {
        self.charge / (self.c * self.hbar)
    }
}

/// Ideal infinite solenoid along the z axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolenoidSpec {
    pub radius: f64,
    pub b_interior: f64,
    pub shielded: bool,
}

impl SolenoidSpec {
    pub fn new(radius: f64, b_interior: f64) -> Result<Self> {
        let s = Self { radius, b_interior, shielded: false };
        s.validate()?;
        Ok(s)
    }

    /// Interior field from turns per unit length `n` and current `i`:
    /// B = 4 pi n i / c.
    pub fn from_winding(radius: f64, turns_per_length: f64, current: f64, units: &UnitSystem) -> Result<Self> {
        Self::new(radius, b_from_winding(turns_per_length, current, units))
    }

    pub fn shielded(mut self, shielded: bool) -> Self {
        self.shielded = shielded;
        self
    }

    pub fn with_field(mut self, b_interior: f64) -> Self {
        self.b_interior = b_interior;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::invalid(format!("solenoid radius must be positive and finite, got {}", self.radius)));
        }
        if !self.b_interior.is_finite() {
            return Err(Error::invalid("solenoid interior field must be finite"));
        }
        Ok(())
    }

    pub fn contains(&self, r: Vec3) -> bool {
        r.rho() < self.radius
    }
}

pub fn b_from_winding(turns_per_length: f64, current: f64, units: &UnitSystem) -> f64 {
    4.0 * PI * turns_per_length * current / units.c
}

/// Signed point charge with a position and velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointCharge {
    pub q: f64,
    pub position: Vec3,
    pub velocity: Vec3,
}

impl PointCharge {
    pub fn new(q: f64, position: Vec3, velocity: Vec3, units: &UnitSystem) -> Result<Self> {
        Self::with_beta_ceiling(q, position, velocity, units, DEFAULT_BETA_CEILING)
    }

    pub fn with_beta_ceiling(q: f64, position: Vec3, velocity: Vec3, units: &UnitSystem, ceiling: f64) -> Result<Self> {
        if !q.is_finite() || !position.is_finite() || !velocity.is_finite() {
            return Err(Error::invalid("point charge has non-finite components"));
        }
        let beta = velocity.norm() / units.c;
        if beta >= ceiling {
            return Err(Error::invalid(format!("|v|/c = {beta} is not below the first-order ceiling {ceiling}")));
        }
        Ok(Self { q, position, velocity })
    }

    pub fn at_rest(q: f64, position: Vec3) -> Self {
        Self { q, position, velocity: Vec3::ZERO }
    }
}

/// Solenoid field at `r_prime`: B z-hat strictly inside, zero elsewhere.
pub fn interior_b_field(sol: &SolenoidSpec, r_prime: Vec3) -> Vec3 {
    if sol.contains(r_prime) {
        Vec3::new(0.0, 0.0, sol.b_interior)
    } else {
        Vec3::ZERO
    }
}

/// Magnetic flux through any cross-section of the solenoid, B pi R^2.
pub fn enclosed_flux(sol: &SolenoidSpec) -> f64 {
    sol.b_interior * PI * sol.radius * sol.radius
}

/// Azimuthal magnitude of A at cylindrical radius `rho`.
fn potential_magnitude(sol: &SolenoidSpec, rho: f64) -> f64 {
    if rho < sol.radius {
        0.5 * sol.b_interior * rho
    } else {
        enclosed_flux(sol) / (2.0 * PI * rho)
    }
}

/// Vector potential in the symmetric (Coulomb) gauge, azimuthal about +z:
/// magnitude B rho / 2 inside and Phi / (2 pi rho) outside. Zero on the axis.
pub fn vector_potential(sol: &SolenoidSpec, r: Vec3) -> Vec3 {
    let rho = r.rho();
    if rho == 0.0 {
        return Vec3::ZERO;
    }
    let a = potential_magnitude(sol, rho);
    Vec3::new(-r.y / rho * a, r.x / rho * a, 0.0)
}

/// Jacobian `J[i][j] = dA_i / dx_j` of [`vector_potential`] at `r`.
///
/// Used for the analytic chain rule dA/dt = J v along a trajectory.
pub fn vector_potential_jacobian(sol: &SolenoidSpec, r: Vec3) -> [[f64; 3]; 3] {
    let rho2 = r.x * r.x + r.y * r.y;
    if rho2 < sol.radius * sol.radius {
        // A = (B/2)(-y, x, 0)
        let h = 0.5 * sol.b_interior;
        return [[0.0, -h, 0.0], [h, 0.0, 0.0], [0.0, 0.0, 0.0]];
    }
    // A = k (-y, x, 0) / rho^2, k = Phi / (2 pi)
    let k = enclosed_flux(sol) / (2.0 * PI);
    let inv4 = 1.0 / (rho2 * rho2);
    let (x, y) = (r.x, r.y);
    [
        [2.0 * k * x * y * inv4, k * (y * y - x * x) * inv4, 0.0],
        [k * (y * y - x * x) * inv4, -2.0 * k * x * y * inv4, 0.0],
        [0.0, 0.0, 0.0],
    ]
}

/// Unretarded Coulomb field of `charge` evaluated at `r_prime`.
///
/// When `shield` is a shielded solenoid and `r_prime` lies inside it, the
/// field is taken to vanish there.
pub fn coulomb_field(charge: &PointCharge, r_prime: Vec3, shield: Option<&SolenoidSpec>) -> Result<Vec3> {
    let d = r_prime - charge.position;
    let d2 = d.norm_squared();
    if d2 == 0.0 {
        return Err(Error::CoincidentPoints { x: r_prime.x, y: r_prime.y, z: r_prime.z });
    }
    if let Some(sol) = shield {
        if sol.shielded && sol.contains(r_prime) {
            return Ok(Vec3::ZERO);
        }
    }
    Ok(d * (charge.q / (d2 * d2.sqrt())))
}

/// Magnetic field of the moving charge to first order in v/c: (v/c) x E.
pub fn electron_b_field(
    charge: &PointCharge,
    r_prime: Vec3,
    units: &UnitSystem,
    shield: Option<&SolenoidSpec>,
) -> Result<Vec3> {
    let e = coulomb_field(charge, r_prime, shield)?;
    Ok((charge.velocity / units.c).cross(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk(b: f64, r: f64) -> SolenoidSpec {
        SolenoidSpec::new(r, b).unwrap()
    }

    #[test]
    fn interior_field_examples() {
        assert_eq!(interior_b_field(&desk(1.0, 1.0), Vec3::new(0.5, 0.0, 7.0)), Vec3::Z);
        assert_eq!(interior_b_field(&desk(1.0, 1.0), Vec3::new(2.0, 0.0, 0.0)), Vec3::ZERO);
        assert_eq!(interior_b_field(&desk(0.0, 1.0), Vec3::new(0.5, 0.0, 0.0)), Vec3::ZERO);
        // boundary is exterior
        assert_eq!(interior_b_field(&desk(1.0, 1.0), Vec3::new(1.0, 0.0, 0.0)), Vec3::ZERO);
    }

    #[test]
    fn vector_potential_examples() {
        let a = vector_potential(&desk(1.0, 1.0), Vec3::new(2.0, 0.0, 0.0));
        assert!((a - Vec3::new(0.0, 0.25, 0.0)).norm() < 1e-15);
        assert_eq!(vector_potential(&desk(1.0, 1.0), Vec3::ZERO), Vec3::ZERO);
        let a2 = vector_potential(&desk(2.0, 1.0), Vec3::new(2.0, 0.0, 0.0));
        assert!((a2 - Vec3::new(0.0, 0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn potential_is_continuous_at_the_wall() {
        let sol = desk(1.7, 1.3);
        let inside = vector_potential(&sol, Vec3::new(1.3 * (1.0 - 1e-12), 0.0, 0.0));
        let outside = vector_potential(&sol, Vec3::new(1.3, 0.0, 0.0));
        assert!((inside - outside).norm() < 1e-11);
    }

    #[test]
    fn flux_examples() {
        assert!((enclosed_flux(&desk(1.0, 1.0)) - PI).abs() < 1e-15);
        assert_eq!(enclosed_flux(&desk(0.0, 1.0)), 0.0);
        assert!((enclosed_flux(&desk(1.0, 2.0)) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn flux_matches_midpoint_quadrature_of_interior_field() {
        // 2D midpoint rule on a square grid covering the disc
        let sol = desk(1.0, 1.0);
        let n = 4000;
        let h = 2.0 / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let x = -1.0 + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y = -1.0 + (j as f64 + 0.5) * h;
                sum += interior_b_field(&sol, Vec3::new(x, y, 0.0)).z;
            }
        }
        sum *= h * h;
        // staircase error of the disc boundary is O(h^1.5)
        assert!((sum - enclosed_flux(&sol)).abs() / PI < 1e-4, "{sum}");
    }

    #[test]
    fn flux_matches_polar_midpoint_quadrature() {
        let sol = desk(1.0, 1.0);
        let (nr, nphi) = (2000, 64);
        let dr = sol.radius / nr as f64;
        let dphi = 2.0 * PI / nphi as f64;
        let mut sum = 0.0;
        for i in 0..nr {
            let rho = (i as f64 + 0.5) * dr;
            for j in 0..nphi {
                let phi = (j as f64 + 0.5) * dphi;
                let p = Vec3::new(rho * phi.cos(), rho * phi.sin(), 0.0);
                sum += interior_b_field(&sol, p).z * rho * dr * dphi;
            }
        }
        assert!((sum - PI).abs() / PI <= 1e-6, "{sum}");
    }

    #[test]
    fn coulomb_examples() {
        let units = UnitSystem::desk();
        let c = PointCharge::new(1.0, Vec3::ZERO, Vec3::ZERO, &units).unwrap();
        assert_eq!(coulomb_field(&c, Vec3::X, None).unwrap(), Vec3::X);
        assert_eq!(coulomb_field(&c, Vec3::new(2.0, 0.0, 0.0), None).unwrap(), Vec3::new(0.25, 0.0, 0.0));
        let neg = PointCharge::at_rest(-1.0, Vec3::ZERO);
        assert_eq!(coulomb_field(&neg, Vec3::X, None).unwrap(), Vec3::new(-1.0, 0.0, 0.0));
        assert!(matches!(coulomb_field(&c, Vec3::ZERO, None), Err(Error::CoincidentPoints { .. })));
    }

    #[test]
    fn coulomb_matches_finite_difference_of_potential() {
        let c = PointCharge::at_rest(1.0, Vec3::new(0.3, -0.2, 0.1));
        let phi = |p: Vec3| c.q / (p - c.position).norm();
        let p = Vec3::new(2.0, 0.5, -0.7);
        let h = 1e-5;
        let grad = Vec3::new(
            (phi(p + Vec3::X * h) - phi(p - Vec3::X * h)) / (2.0 * h),
            (phi(p + Vec3::Y * h) - phi(p - Vec3::Y * h)) / (2.0 * h),
            (phi(p + Vec3::Z * h) - phi(p - Vec3::Z * h)) / (2.0 * h),
        );
        let e = coulomb_field(&c, p, None).unwrap();
        assert!((e + grad).norm() / e.norm() < 1e-8);
    }

    #[test]
    fn shield_zeroes_field_inside_only() {
        let sol = desk(1.0, 1.0).shielded(true);
        let c = PointCharge::at_rest(1.0, Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(coulomb_field(&c, Vec3::new(0.5, 0.0, 0.0), Some(&sol)).unwrap(), Vec3::ZERO);
        assert_ne!(coulomb_field(&c, Vec3::new(3.0, 0.0, 0.0), Some(&sol)).unwrap(), Vec3::ZERO);
        let open = desk(1.0, 1.0);
        assert_ne!(coulomb_field(&c, Vec3::new(0.5, 0.0, 0.0), Some(&open)).unwrap(), Vec3::ZERO);
    }

    #[test]
    fn electron_b_field_examples() {
        let units = UnitSystem::desk();
        let still = PointCharge::at_rest(1.0, Vec3::ZERO);
        assert_eq!(electron_b_field(&still, Vec3::new(0.3, 2.0, 1.0), &units, None).unwrap(), Vec3::ZERO);
        let moving = PointCharge::new(1.0, Vec3::ZERO, Vec3::new(0.0, 0.01, 0.0), &units).unwrap();
        let b = electron_b_field(&moving, Vec3::X, &units, None).unwrap();
        assert!((b - Vec3::new(0.0, 0.0, -0.01)).norm() < 1e-18);
    }

    #[test]
    fn beta_ceiling_enforced() {
        let units = UnitSystem::desk();
        assert!(PointCharge::new(1.0, Vec3::ZERO, Vec3::new(0.1, 0.0, 0.0), &units).is_err());
        assert!(PointCharge::with_beta_ceiling(1.0, Vec3::ZERO, Vec3::new(0.1, 0.0, 0.0), &units, 0.5).is_ok());
    }

    #[test]
    fn winding_helper() {
        let units = UnitSystem::desk();
        let s = SolenoidSpec::from_winding(1.0, 2.0, 0.5, &units).unwrap();
        assert!((s.b_interior - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let sol = desk(1.3, 1.0);
        for &p in &[Vec3::new(2.0, 0.7, 0.3), Vec3::new(0.4, -0.3, 1.0), Vec3::new(-1.5, -2.5, 0.0)] {
            let j = vector_potential_jacobian(&sol, p);
            let h = 1e-6;
            for (col, e) in [Vec3::X, Vec3::Y, Vec3::Z].into_iter().enumerate() {
                let d = (vector_potential(&sol, p + e * h) - vector_potential(&sol, p - e * h)) / (2.0 * h);
                for (row, v) in d.to_array().into_iter().enumerate() {
                    assert!((j[row][col] - v).abs() < 1e-8, "{row},{col}: {} vs {v}", j[row][col]);
                }
            }
        }
    }

    #[test]
    fn invalid_solenoid_rejected() {
        assert!(SolenoidSpec::new(0.0, 1.0).is_err());
        assert!(SolenoidSpec::new(1.0, f64::NAN).is_err());
    }
}
