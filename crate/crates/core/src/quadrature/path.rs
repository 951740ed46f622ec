//! Time integrals along a closed circular trajectory.

use rayon::prelude::*;

use super::rules::gauss_legendre;
use super::{IntegralResult, QuadratureConfig, QuadratureError, Quantity};
use crate::phase::CircularTrajectory;
use crate::vec3::Vec3;

const PANEL_ORDER: usize = 7;
const PANELS_PER_WINDING: usize = 4;

fn composite<T, G>(g: &G, traj: &CircularTrajectory, panels: usize, nodes: &[f64], weights: &[f64]) -> T
where
    T: Quantity,
    G: Fn(Vec3, Vec3, f64) -> T + Sync,
{
    let span = traj.duration();
    let h = span / panels as f64;
    let times: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            let mid = (p as f64 + 0.5) * h;
            nodes.iter().zip(weights).map(move |(x, w)| (mid + 0.5 * h * x, 0.5 * h * w))
        })
        .collect();
    let terms: Vec<T> = times.par_iter().map(|&(t, w)| g(traj.position(t), traj.velocity(t), t) * w).collect();
    terms.into_iter().fold(T::default(), |acc, v| acc + v)
}

/// Integral of `g(position, velocity, t) dt` over all windings of `traj`.
///
/// Composite Gauss–Legendre panels in time (equivalently in angle); the panel
/// count doubles until successive sums differ by at most the tolerance, and
/// that difference is reported as the error.
pub fn integrate_loop<T, G>(
    g: G,
    traj: &CircularTrajectory,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>, QuadratureError<T>>
where
    T: Quantity,
    G: Fn(Vec3, Vec3, f64) -> T + Sync,
{
    if traj.speed.is_nan() || traj.speed <= 0.0 || traj.windings == 0 || traj.rho0.is_nan() || traj.rho0 <= 0.0 {
        return Err(QuadratureError::Domain(
            "loop integrals need positive speed, positive radius and nonzero windings".into(),
        ));
    }
    cfg.install(|| {
        let (nodes, weights) = gauss_legendre(PANEL_ORDER);
        let mut panels = PANELS_PER_WINDING * traj.windings.unsigned_abs() as usize;
        let mut evaluations = (panels * PANEL_ORDER) as u64;
        let mut coarse: T = composite(&g, traj, panels, &nodes, &weights);
        let mut last = None;
        for _ in 0..cfg.max_refinement_depth {
            panels *= 2;
            evaluations += (panels * PANEL_ORDER) as u64;
            let fine: T = composite(&g, traj, panels, &nodes, &weights);
            if !fine.is_finite() {
                return Err(QuadratureError::Domain("loop integrand is not finite".into()));
            }
            let error = (fine - coarse).abs();
            let result = IntegralResult { value: fine, error_estimate: error, evaluations, z_extent_used: 0.0 };
            if error.magnitude() <= cfg.target(fine.magnitude()) {
                return Ok(result);
            }
            if evaluations >= cfg.max_evaluations {
                return Err(QuadratureError::NotConverged {
                    target: cfg.target(fine.magnitude()),
                    best: result,
                    reason: "evaluation budget exhausted".into(),
                });
            }
            coarse = fine;
            last = Some(result);
        }
        let best = last.unwrap_or(IntegralResult {
            value: coarse,
            error_estimate: T::splat(f64::INFINITY),
            evaluations,
            z_extent_used: 0.0,
        });
        Err(QuadratureError::NotConverged {
            target: cfg.target(best.value.magnitude()),
            best,
            reason: format!("{} panel doublings exhausted", cfg.max_refinement_depth),
        })
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::geometry::{vector_potential, SolenoidSpec};

    #[test]
    fn zero_integrand() {
        let traj = CircularTrajectory::new(2.0, 0.01, 1);
        let r = integrate_loop(|_p, _v, _t| 0.0, &traj, &QuadratureConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn arc_length() {
        let cfg = QuadratureConfig::default();
        for k in [1, -1, 3] {
            let traj = CircularTrajectory::new(2.0, 0.01, k);
            let r = integrate_loop(|_p, v: Vec3, _t| v.norm(), &traj, &cfg).unwrap();
            let exact = 4.0 * PI * k.abs() as f64;
            assert!((r.value - exact).abs() < 1e-9 * exact);
        }
    }

    #[test]
    fn circulation_of_vector_potential_is_flux() {
        let sol = SolenoidSpec::new(1.0, 1.0).unwrap();
        let cfg = QuadratureConfig::default().with_rel_tol(1e-10);
        for (k, rho0) in [(1, 2.0), (-1, 1.5), (2, 4.0)] {
            let traj = CircularTrajectory::new(rho0, 0.01, k);
            let r = integrate_loop(|p, v: Vec3, _t| vector_potential(&sol, p).dot(v), &traj, &cfg).unwrap();
            let exact = PI * k as f64;
            assert!((r.value - exact).abs() < 1e-9, "k={k}: {}", r.value);
            assert!((r.value - exact).abs() <= r.error_estimate.max(1e-13));
        }
    }

    #[test]
    fn nonuniform_integrand_converges() {
        // int_0^T cos^8(omega t) dt over one period = T * 35/128
        let traj = CircularTrajectory::new(2.0, 0.01, 1);
        let w = traj.omega();
        let r = integrate_loop(|_p, _v, t: f64| (w * t).cos().powi(8), &traj, &QuadratureConfig::default()).unwrap();
        assert!((r.value - traj.period() * 35.0 / 128.0).abs() < 1e-6 * r.value);
    }

    #[test]
    fn stationary_loop_rejected() {
        let traj = CircularTrajectory::new(2.0, 0.0, 1);
        let r = integrate_loop(|_p, _v, _t| 1.0, &traj, &QuadratureConfig::default());
        assert!(matches!(r, Err(QuadratureError::Domain(_))));
    }
}
