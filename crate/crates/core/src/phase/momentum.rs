//! Interference momentum, hidden momentum and interference energy: volume
//! integrals over the solenoid involving the fields of the moving charge.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    coulomb_field, electron_b_field, interior_b_field, vector_potential, PointCharge, SolenoidSpec, UnitSystem,
};
use crate::phase::CLEARANCE_FACTOR;
use crate::quadrature::{integrate_solenoid_volume, IntegralResult, QuadratureConfig, Quantity};
use crate::vec3::Vec3;

fn check_exterior(sol: &SolenoidSpec, charge: &PointCharge) -> Result<()> {
    let rho = charge.position.rho();
    if rho < CLEARANCE_FACTOR * sol.radius {
        return Err(Error::invalid(format!(
            "charge at rho = {rho} violates the clearance rho >= {CLEARANCE_FACTOR} R (R = {})",
            sol.radius
        )));
    }
    Ok(())
}

fn nan_on_error(v: Result<Vec3>) -> Vec3 {
    v.unwrap_or(Vec3::splat(f64::NAN))
}

/// Magnetization of the ideal solenoid, B / (4 pi) along +z inside, zero outside.
pub fn magnetization_density(sol: &SolenoidSpec, r_prime: Vec3) -> Vec3 {
    interior_b_field(sol, r_prime) / (4.0 * PI)
}

/// Momentum of interference between the charge's electric field and the
/// solenoid field, (1 / 4 pi c) times the volume integral of E_el x B_sol.
///
/// In shielded mode E_el vanishes inside the cylinder and so does the result.
pub fn field_momentum(
    sol: &SolenoidSpec,
    charge: &PointCharge,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
) -> Result<IntegralResult<Vec3>> {
    check_exterior(sol, charge)?;
    let scale = 1.0 / (4.0 * PI * units.c);
    integrate_solenoid_volume(
        |rp| nan_on_error(coulomb_field(charge, rp, Some(sol))).cross(interior_b_field(sol, rp)) * scale,
        sol,
        cfg,
    )
    .map_err(|e| e.into_error("field momentum"))
}

/// Hidden momentum of the solenoid's moment elements, (1/c) times the volume
/// integral of M x E_el.
pub fn hidden_momentum_total(
    sol: &SolenoidSpec,
    charge: &PointCharge,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
) -> Result<IntegralResult<Vec3>> {
    check_exterior(sol, charge)?;
    let inv_c = 1.0 / units.c;
    integrate_solenoid_volume(
        |rp| magnetization_density(sol, rp).cross(nan_on_error(coulomb_field(charge, rp, Some(sol)))) * inv_c,
        sol,
        cfg,
    )
    .map_err(|e| e.into_error("hidden momentum"))
}

/// Energy of interference, the volume integral of B_el . B_sol / (4 pi).
pub fn interference_energy(
    sol: &SolenoidSpec,
    charge: &PointCharge,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
) -> Result<IntegralResult<f64>> {
    check_exterior(sol, charge)?;
    let scale = 1.0 / (4.0 * PI);
    integrate_solenoid_volume(
        |rp| {
            let b_el = nan_on_error(electron_b_field(charge, rp, units, Some(sol)));
            b_el.dot(interior_b_field(sol, rp)) * scale
        },
        sol,
        cfg,
    )
    .map_err(|e| e.into_error("interference energy"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentumIdentityResidual {
    pub point: Vec3,
    /// (q/c) A(r).
    pub lhs: Vec3,
    /// Numeric interference momentum.
    pub rhs: Vec3,
    pub rhs_error: Vec3,
    /// |lhs - rhs| / max(|lhs|, floor).
    pub residual: f64,
    /// Radial and axial parts of rhs relative to max(|rhs|, floor).
    pub non_azimuthal: f64,
    pub evaluations: u64,
    pub z_extent_used: f64,
}

/// Compare (q/c) A(r) with the numeric interference momentum at the charge's position.
pub fn verify_momentum_identity(
    sol: &SolenoidSpec,
    charge: &PointCharge,
    cfg: &QuadratureConfig,
    units: &UnitSystem,
) -> Result<MomentumIdentityResidual> {
    let lhs = vector_potential(sol, charge.position) * (charge.q / units.c);
    let rhs = field_momentum(sol, charge, cfg, units)?;
    let floor = cfg.abs_tol;
    let residual = (lhs - rhs.value).norm() / lhs.norm().max(floor);
    let p = charge.position;
    let rho = p.rho();
    let radial_hat = if rho > 0.0 { Vec3::new(p.x / rho, p.y / rho, 0.0) } else { Vec3::X };
    let leak = rhs.value.dot(radial_hat).hypot(rhs.value.z);
    Ok(MomentumIdentityResidual {
        point: p,
        lhs,
        rhs: rhs.value,
        rhs_error: rhs.error_estimate,
        residual,
        non_azimuthal: leak / rhs.value.norm().max(floor),
        evaluations: rhs.evaluations,
        z_extent_used: rhs.z_extent_used,
    })
}

/// Pointwise integrands of the momentum and energy routes:
/// returns ((E_el x B_sol) . v, c (B_el . B_sol)).
pub fn triple_product_pair(
    charge: &PointCharge,
    r_prime: Vec3,
    sol: &SolenoidSpec,
    units: &UnitSystem,
) -> Result<(f64, f64)> {
    let e = coulomb_field(charge, r_prime, None)?;
    let b_sol = interior_b_field(sol, r_prime);
    let b_el = electron_b_field(charge, r_prime, units, None)?;
    Ok((e.cross(b_sol).dot(charge.velocity), units.c * b_el.dot(b_sol)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(shielded: bool) -> (SolenoidSpec, UnitSystem, QuadratureConfig) {
        (
            SolenoidSpec::new(1.0, 1.0).unwrap().shielded(shielded),
            UnitSystem::desk(),
            QuadratureConfig::default().with_rel_tol(1e-5),
        )
    }

    #[test]
    fn magnetization_examples() {
        let (sol, _, _) = setup(false);
        let m = magnetization_density(&sol, Vec3::new(0.2, 0.1, 3.0));
        assert!((m - Vec3::new(0.0, 0.0, 1.0 / (4.0 * PI))).norm() < 1e-17);
        assert_eq!(magnetization_density(&sol, Vec3::new(2.0, 0.0, 0.0)), Vec3::ZERO);
        assert_eq!(magnetization_density(&sol.with_field(0.0), Vec3::new(0.2, 0.0, 0.0)), Vec3::ZERO);
    }

    #[test]
    fn field_momentum_matches_potential() {
        let (sol, units, cfg) = setup(false);
        let c = PointCharge::at_rest(1.0, Vec3::new(2.0, 0.0, 0.0));
        let p = field_momentum(&sol, &c, &cfg, &units).unwrap();
        assert!((p.value - Vec3::new(0.0, 0.25, 0.0)).norm() < 1e-4, "{:?}", p);
    }

    #[test]
    fn zero_charge_gives_zero_momentum() {
        let (sol, units, cfg) = setup(false);
        let c = PointCharge::at_rest(0.0, Vec3::new(2.0, 0.0, 0.0));
        let p = field_momentum(&sol, &c, &cfg, &units).unwrap();
        assert_eq!(p.value, Vec3::ZERO);
        let h = hidden_momentum_total(&sol, &c, &cfg, &units).unwrap();
        assert_eq!(h.value, Vec3::ZERO);
        let id = verify_momentum_identity(&sol, &c, &cfg, &units).unwrap();
        assert_eq!(id.residual, 0.0);
    }

    #[test]
    fn shielded_momentum_vanishes() {
        let (sol, units, cfg) = setup(true);
        let c = PointCharge::at_rest(1.0, Vec3::new(2.0, 0.0, 0.0));
        let p = field_momentum(&sol, &c, &cfg, &units).unwrap();
        assert_eq!(p.value, Vec3::ZERO);
    }

    #[test]
    fn static_charge_has_no_interference_energy() {
        let (sol, units, cfg) = setup(false);
        let c = PointCharge::at_rest(1.0, Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(interference_energy(&sol, &c, &cfg, &units).unwrap().value, 0.0);
    }

    #[test]
    fn charge_inside_clearance_rejected() {
        let (sol, units, cfg) = setup(false);
        let c = PointCharge::at_rest(1.0, Vec3::new(1.01, 0.0, 0.0));
        assert!(matches!(field_momentum(&sol, &c, &cfg, &units), Err(Error::Invalid(_))));
    }
}
