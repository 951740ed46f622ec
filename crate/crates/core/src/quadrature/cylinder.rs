//! Volume integrals over the infinite solenoid cylinder.
//!
//! The axial direction is truncated at |z'| <= Z. Z starts at
//! `z_half_extent_initial * R` and doubles, adding one slab per side, until
//! the tail bound drops below `tail_fraction` of the error target.

use std::f64::consts::PI;

use thiserror::Error;

use super::cubature::{Box3, Cubature};
use super::rules::gauss_legendre;
use super::{IntegralResult, QuadratureConfig, QuadratureError, Quantity};
use crate::geometry::SolenoidSpec;
use crate::vec3::Vec3;

const INITIAL_PHI_CELLS: usize = 8;
const INITIAL_Z_CELLS: usize = 8;
const SLAB_PHI_CELLS: usize = 4;
const CROSS_SECTION_RHO_ORDER: usize = 16;
const CROSS_SECTION_PHI_ORDER: usize = 24;
const CROSS_SECTION_PHI_PANELS: usize = 4;
const TAIL_DECAY_EXPONENT: f64 = 3.0;

fn cartesian(u: [f64; 3]) -> Vec3 {
    let (s, c) = u[1].sin_cos();
    Vec3::new(u[0] * c, u[0] * s, u[2])
}

fn cylinder_cells(radius: f64, z_lo: f64, z_hi: f64, nphi: usize, nz: usize) -> Vec<Box3> {
    let dphi = 2.0 * PI / nphi as f64;
    let dz = (z_hi - z_lo) / nz as f64;
    let mut out = Vec::with_capacity(nphi * nz);
    for iz in 0..nz {
        for ip in 0..nphi {
            out.push(Box3::new(
                [0.0, ip as f64 * dphi, z_lo + iz as f64 * dz],
                [radius, (ip + 1) as f64 * dphi, z_lo + (iz + 1) as f64 * dz],
            ));
        }
    }
    out
}

/// Integral over the disc rho' < R at fixed height `z`, by a fixed
/// polar Gauss–Legendre product rule.
pub fn cross_section_integral<T, F>(f: &F, sol: &SolenoidSpec, z: f64) -> T
where
    T: Quantity,
    F: Fn(Vec3) -> T,
{
    let (xr, wr) = gauss_legendre(CROSS_SECTION_RHO_ORDER);
    let (xp, wp) = gauss_legendre(CROSS_SECTION_PHI_ORDER);
    let r = sol.radius;
    let dphi = 2.0 * PI / CROSS_SECTION_PHI_PANELS as f64;
    let mut sum = T::default();
    for panel in 0..CROSS_SECTION_PHI_PANELS {
        let phi_mid = (panel as f64 + 0.5) * dphi;
        for (a, wa) in xr.iter().zip(&wr) {
            let rho = 0.5 * r * (1.0 + a);
            for (b, wb) in xp.iter().zip(&wp) {
                let phi = phi_mid + 0.5 * dphi * b;
                let p = Vec3::new(rho * phi.cos(), rho * phi.sin(), z);
                sum = sum + f(p) * (wa * wb * rho);
            }
        }
    }
    sum * (0.5 * r * 0.5 * dphi)
}

/// Samples did not show the decay needed for a tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Error)]
#[error("cross-section does not decay between |z|={half_extent} and |z|={extent} ({near:e} -> {far:e})")]
pub struct TailRefused {
    pub half_extent: f64,
    pub extent: f64,
    pub near: f64,
    pub far: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEstimate {
    /// Bound on the discarded z' > Z contribution.
    pub upper: f64,
    /// Bound on the discarded z' < -Z contribution.
    pub lower: f64,
}

impl TailEstimate {
    pub fn total(&self) -> f64 {
        self.upper + self.lower
    }
}

/// One-sided tail bound from cross-section magnitudes at |z| = Z/2 and Z.
///
/// The decay exponent p is fitted from the two samples and capped at 3, the
/// far-field rate of these integrands; the bound is |g(Z)| Z / (p - 1),
/// which equals C / (2 Z^2) for |g| = C / |z|^3.
pub fn tail_bound_from_samples(near: f64, far: f64, z: f64) -> Result<f64, TailRefused> {
    let refuse = TailRefused { half_extent: 0.5 * z, extent: z, near, far };
    if far == 0.0 && near == 0.0 {
        return Ok(0.0);
    }
    if !(near.is_finite() && far.is_finite()) || far >= near {
        return Err(refuse);
    }
    if far == 0.0 {
        return Ok(0.0);
    }
    let p = (near / far).log2().min(TAIL_DECAY_EXPONENT);
    if p <= 1.0 {
        return Err(refuse);
    }
    Ok(far * z / (p - 1.0))
}

/// Bound on the part of the cylinder integral of `f` with |z'| > `z`.
pub fn tail_estimate<T, F>(f: &F, sol: &SolenoidSpec, z: f64) -> Result<TailEstimate, TailRefused>
where
    T: Quantity,
    F: Fn(Vec3) -> T,
{
    assert!(z > 0.0, "tail extent must be positive");
    let g = |zz: f64| cross_section_integral(f, sol, zz).magnitude();
    let upper = tail_bound_from_samples(g(0.5 * z), g(z), z)?;
    let lower = tail_bound_from_samples(g(-0.5 * z), g(-z), z)?;
    Ok(TailEstimate { upper, lower })
}

const TAIL_SAMPLE_EVALS: u64 =
    (4 * CROSS_SECTION_RHO_ORDER * CROSS_SECTION_PHI_ORDER * CROSS_SECTION_PHI_PANELS) as u64;

/// Integral of `f` over the whole solenoid volume, rho' < R, all z'.
///
/// The returned error estimate is the summed cell error plus the tail bound
/// (added to every component for vector integrands).
pub fn integrate_solenoid_volume<T, F>(
    f: F,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>, QuadratureError<T>>
where
    T: Quantity,
    F: Fn(Vec3) -> T + Sync,
{
    cfg.install(|| volume_inner(&f, sol, cfg))
}

fn volume_inner<T, F>(
    f: &F,
    sol: &SolenoidSpec,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>, QuadratureError<T>>
where
    T: Quantity,
    F: Fn(Vec3) -> T + Sync,
{
    let r = sol.radius;
    let mut z = cfg.z_half_extent_initial * r;
    let g = |u: [f64; 3]| f(cartesian(u)) * u[0];
    let mut cub = Cubature::new(&g, cfg);
    cub.add_boxes(&cylinder_cells(r, -z, z, INITIAL_PHI_CELLS, INITIAL_Z_CELLS));
    let cell_share = 1.0 - cfg.tail_fraction;
    let mut doublings = 0;
    loop {
        cub.refine(cell_share, z)?;
        let (value, _) = cub.totals();
        let allowed = cfg.tail_fraction * cfg.target(value.magnitude());
        let tail = tail_estimate(f, sol, z);
        cub.evaluations += TAIL_SAMPLE_EVALS;
        match tail {
            Ok(t) if t.total() <= allowed => {
                let mut res = cub.result(z);
                res.error_estimate = res.error_estimate + T::splat(t.total());
                return Ok(res);
            }
            Ok(t) => log::trace!("tail {:e} above {:e} at Z={z}", t.total(), allowed),
            Err(e) => log::trace!("tail refused at Z={z}: {e}"),
        }
        if doublings >= cfg.max_refinement_depth {
            let mut best = cub.result(z);
            if let Ok(t) = tail {
                best.error_estimate = best.error_estimate + T::splat(t.total());
            }
            return Err(QuadratureError::NotConverged {
                best,
                target: cfg.target(value.magnitude()),
                reason: format!("tail still above target after {doublings} doublings of Z (Z = {z})"),
            });
        }
        let mut slabs = cylinder_cells(r, z, 2.0 * z, SLAB_PHI_CELLS, 1);
        slabs.extend(cylinder_cells(r, -2.0 * z, -z, SLAB_PHI_CELLS, 1));
        cub.add_boxes(&slabs);
        z *= 2.0;
        doublings += 1;
    }
}

/// Integral over the cylinder truncated to z_lo <= z' <= z_hi, no tail.
pub fn integrate_cylinder_fixed<T, F>(
    f: F,
    sol: &SolenoidSpec,
    z_lo: f64,
    z_hi: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>, QuadratureError<T>>
where
    T: Quantity,
    F: Fn(Vec3) -> T + Sync,
{
    if z_hi.partial_cmp(&z_lo) != Some(std::cmp::Ordering::Greater) {
        return Err(QuadratureError::Domain(format!("empty axial range [{z_lo}, {z_hi}]")));
    }
    let g = |u: [f64; 3]| f(cartesian(u)) * u[0];
    cfg.install(|| {
        let mut cub = Cubature::new(&g, cfg);
        cub.add_boxes(&cylinder_cells(sol.radius, z_lo, z_hi, INITIAL_PHI_CELLS, INITIAL_Z_CELLS));
        cub.refine(1.0, z_hi.abs().max(z_lo.abs()))?;
        Ok(cub.result(z_hi.abs().max(z_lo.abs())))
    })
}
