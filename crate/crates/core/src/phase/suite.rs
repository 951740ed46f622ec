//! Consistency harness: every identity, sign relation and force balance of
//! the phase engine evaluated on one scenario, in a fixed check order.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use super::{
    force_on_currents, hidden_force, hidden_momentum_total, phase_ab, phase_field_momentum, phase_hidden_momentum,
    phase_interference_energy, triple_product_pair, verify_momentum_identity, CircularTrajectory, PhaseReport,
    CLEARANCE_FACTOR,
};
use crate::error::{Error, Result};
use crate::geometry::{enclosed_flux, interior_b_field, PointCharge, SolenoidSpec, UnitSystem};
use crate::quadrature::{integrate_loop, QuadratureConfig};
use crate::scenario::Scenario;
use crate::vec3::Vec3;

pub const IDENTITY_RESIDUAL_TOL: f64 = 1e-4;
pub const PHASE_ABS_TOL: f64 = 1e-3;
pub const SIGMA_FACTOR: f64 = 3.0;
pub const FD_RESIDUAL_TOL: f64 = 1e-6;
pub const STOKES_REL_TOL: f64 = 1e-8;
pub const FLUX_QUADRATURE_REL_TOL: f64 = 1e-6;
pub const TRIPLE_PRODUCT_REL_TOL: f64 = 1e-12;
pub const TRIPLE_PRODUCT_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
    /// The documented shielded-mode discrepancy; counts as a pass.
    ExpectedDiscrepancy,
}

impl CheckStatus {
    pub fn is_pass(self) -> bool {
        matches!(self, CheckStatus::Pass | CheckStatus::ExpectedDiscrepancy)
    }

    pub fn label(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inconclusive => "INCONCLUSIVE",
            CheckStatus::ExpectedDiscrepancy => "EXPECTED-DISCREPANCY",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    /// The compared quantity, usually an absolute or relative deviation.
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn within(name: impl Into<String>, measured: f64, tolerance: f64, detail: String) -> Self {
        let status = if measured <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { name: name.into(), status, measured, tolerance, detail }
    }

    fn failed(name: impl Into<String>, e: &Error) -> Self {
        let status = if e.is_convergence_failure() { CheckStatus::Inconclusive } else { CheckStatus::Fail };
        Self { name: name.into(), status, measured: f64::NAN, tolerance: f64::NAN, detail: e.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub phases: Vec<PhaseReport>,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status.is_pass())
    }

    pub fn any_inconclusive(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Inconclusive)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.phases {
            writeln!(f, "phase {:<22} {:>17.8e} +- {:.3e}", p.method.as_str(), p.value, p.error_estimate)?;
        }
        for c in &self.checks {
            writeln!(
                f,
                "{:<20} {:<40} measured={:.8e} tol={:.3e}  {}",
                c.status.label(),
                c.name,
                c.measured,
                c.tolerance,
                c.detail
            )?;
        }
        let passed = self.checks.iter().filter(|c| c.status.is_pass()).count();
        write!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

/// Run `body`, turning an engine error into a FAIL or INCONCLUSIVE row.
fn guarded(name: &str, body: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    body().unwrap_or_else(|e| CheckResult::failed(name, &e))
}

/// Tolerance for two phases: 3 sigma of the combined error estimates, never
/// looser than `cap`.
fn sigma_tol(a: &PhaseReport, b: &PhaseReport, cap: f64) -> f64 {
    (SIGMA_FACTOR * (a.error_estimate + b.error_estimate)).max(1e-14).min(cap)
}

fn fmt_point(p: Vec3) -> String {
    format!("({}, {}, {})", p.x, p.y, p.z)
}

struct Ctx<'a> {
    units: UnitSystem,
    sol: SolenoidSpec,
    traj: CircularTrajectory,
    cfg: QuadratureConfig,
    scenario: &'a Scenario,
}

impl Ctx<'_> {
    fn charge_at(&self, p: Vec3) -> Result<PointCharge> {
        PointCharge::new(self.units.charge, p, Vec3::ZERO, &self.units)
    }

    fn all_phases(
        &self,
        traj: &CircularTrajectory,
        sol: &SolenoidSpec,
        units: &UnitSystem,
    ) -> Result<[PhaseReport; 4]> {
        Ok([
            phase_ab(traj, sol, &self.cfg, units)?,
            phase_field_momentum(traj, sol, &self.cfg, units)?,
            phase_interference_energy(traj, sol, &self.cfg, units)?,
            phase_hidden_momentum(traj, sol, &self.cfg, units)?,
        ])
    }
}

/// Execute every check on `scenario` and collect the results in declared order.
pub fn run_consistency_suite(scenario: &Scenario) -> SuiteReport {
    let ctx = Ctx {
        units: scenario.units,
        sol: scenario.solenoid(),
        traj: scenario.trajectory,
        cfg: scenario.quadrature,
        scenario,
    };
    let mut checks = Vec::new();
    checks.push(check_flux_closed_form(&ctx));
    checks.push(check_stokes(&ctx));

    let base = ctx.all_phases(&ctx.traj, &ctx.sol, &ctx.units);
    let phases = base.as_ref().map(|p| p.to_vec()).unwrap_or_default();

    checks.push(guarded("phase_ab_closed_form", || {
        let ab = phase_ab(&ctx.traj, &ctx.sol, &ctx.cfg, &ctx.units)?;
        let expected = f64::from(ctx.traj.windings) * ctx.units.phase_per_flux() * enclosed_flux(&ctx.sol);
        let tol = (SIGMA_FACTOR * ab.error_estimate).max(1e-12 * expected.abs().max(1.0));
        Ok(CheckResult::within(
            "phase_ab_closed_form",
            (ab.value - expected).abs(),
            tol,
            format!("ab={:.9} k q Phi/(c hbar)={:.9}", ab.value, expected),
        ))
    }));

    for p in ctx.scenario.identity_points() {
        checks.push(check_identity(&ctx, p));
    }
    for p in ctx.scenario.identity_points() {
        checks.push(check_hidden_cancels(&ctx, p));
    }

    match &base {
        Ok(base) => checks.extend(phase_relation_checks(&ctx, base)),
        Err(e) => {
            for name in [
                "phase_field_momentum_vs_ab",
                "phase_energy_magnitude",
                "phase_hidden_plus_field_momentum",
                "phase_hidden_vs_minus_ab",
            ] {
                checks.push(CheckResult::failed(name, e));
            }
        }
    }

    checks.extend(check_forces(&ctx));
    checks.push(check_flux_only_rho0(&ctx));
    checks.push(check_flux_only_z0(&ctx, base.as_ref().ok()));
    checks.push(check_winding_linearity(&ctx, base.as_ref().ok()));
    checks.push(check_speed_invariance(&ctx, base.as_ref().ok()));
    checks.push(check_linearity(&ctx, base.as_ref().ok()));
    checks.push(check_shielded_contrast(&ctx));
    checks.push(check_triple_product(&ctx));

    SuiteReport { phases, checks }
}

fn check_flux_closed_form(ctx: &Ctx) -> CheckResult {
    let sol = &ctx.sol;
    let (nr, nphi) = (2000usize, 64usize);
    let dr = sol.radius / nr as f64;
    let dphi = 2.0 * PI / nphi as f64;
    let mut sum = 0.0;
    for i in 0..nr {
        let rho = (i as f64 + 0.5) * dr;
        let mut ring = 0.0;
        for j in 0..nphi {
            let phi = (j as f64 + 0.5) * dphi;
            ring += interior_b_field(sol, Vec3::new(rho * phi.cos(), rho * phi.sin(), 0.0)).z;
        }
        sum += ring * rho * dr * dphi;
    }
    let exact = enclosed_flux(sol);
    let dev = (sum - exact).abs();
    CheckResult::within(
        "flux_closed_form",
        dev,
        FLUX_QUADRATURE_REL_TOL * exact.abs().max(f64::MIN_POSITIVE),
        format!("B pi R^2={exact:.9} midpoint={sum:.9}"),
    )
}

fn check_stokes(ctx: &Ctx) -> CheckResult {
    guarded("stokes_loop_radius_independence", || {
        let exact = enclosed_flux(&ctx.sol);
        let mut worst: f64 = 0.0;
        let mut values = Vec::new();
        for f in [1.5, 2.0, 4.0] {
            let traj = CircularTrajectory { rho0: f * ctx.sol.radius, windings: 1, ..ctx.traj };
            let cfg = QuadratureConfig { rel_tol: 1e-12, abs_tol: 1e-15, ..ctx.cfg };
            let r = integrate_loop(|p, v, _| crate::geometry::vector_potential(&ctx.sol, p).dot(v), &traj, &cfg)
                .map_err(|e| e.into_error("stokes loop"))?;
            worst = worst.max((r.value - exact).abs());
            values.push(r.value);
        }
        Ok(CheckResult::within(
            "stokes_loop_radius_independence",
            worst,
            STOKES_REL_TOL * exact.abs().max(1e-300),
            format!("loop integrals {values:.12?} vs flux {exact:.12}"),
        ))
    })
}

fn check_identity(ctx: &Ctx, p: Vec3) -> CheckResult {
    let name = format!("momentum_identity {}", fmt_point(p));
    guarded(&name, || {
        let r = verify_momentum_identity(&ctx.sol, &ctx.charge_at(p)?, &ctx.cfg, &ctx.units)?;
        let detail = format!(
            "lhs=({:.9e}, {:.9e}, {:.9e}) rhs=({:.9e}, {:.9e}, {:.9e}) non-azimuthal={:.2e}",
            r.lhs.x, r.lhs.y, r.lhs.z, r.rhs.x, r.rhs.y, r.rhs.z, r.non_azimuthal
        );
        if ctx.sol.shielded && r.lhs.norm() > ctx.cfg.abs_tol {
            let status =
                if r.rhs.norm() <= ctx.cfg.abs_tol { CheckStatus::ExpectedDiscrepancy } else { CheckStatus::Fail };
            return Ok(CheckResult {
                name: name.clone(),
                status,
                measured: r.rhs.norm(),
                tolerance: ctx.cfg.abs_tol,
                detail: format!("shielded: rhs vanishes while lhs does not; {detail}"),
            });
        }
        let mut c = CheckResult::within(name.clone(), r.residual, IDENTITY_RESIDUAL_TOL, detail);
        if r.non_azimuthal > IDENTITY_RESIDUAL_TOL && r.rhs.norm() > ctx.cfg.abs_tol {
            c.status = CheckStatus::Fail;
            c.detail.push_str(" (rhs not azimuthal)");
        }
        Ok(c)
    })
}

fn check_hidden_cancels(ctx: &Ctx, p: Vec3) -> CheckResult {
    let name = format!("hidden_plus_field_momentum {}", fmt_point(p));
    guarded(&name, || {
        let charge = ctx.charge_at(p)?;
        let field = super::field_momentum(&ctx.sol, &charge, &ctx.cfg, &ctx.units)?;
        let hidden = hidden_momentum_total(&ctx.sol, &charge, &ctx.cfg, &ctx.units)?;
        let sum = (field.value + hidden.value).norm();
        let tol = (SIGMA_FACTOR * (field.error_magnitude() + hidden.error_magnitude())).max(ctx.cfg.abs_tol);
        Ok(CheckResult::within(
            name.clone(),
            sum,
            tol,
            format!("field y={:.9e} hidden y={:.9e}", field.value.y, hidden.value.y),
        ))
    })
}

fn phase_relation_checks(ctx: &Ctx, base: &[PhaseReport; 4]) -> Vec<CheckResult> {
    let [ab, fm, energy, hidden] = base;
    let shielded = ctx.sol.shielded && ab.value.abs() > PHASE_ABS_TOL;
    let vanishes = |p: &PhaseReport| p.value.abs() <= PHASE_ABS_TOL.min(SIGMA_FACTOR * p.error_estimate + 1e-12);
    let discrepancy = |name: &str, p: &PhaseReport| CheckResult {
        name: name.to_string(),
        status: if vanishes(p) { CheckStatus::ExpectedDiscrepancy } else { CheckStatus::Fail },
        measured: p.value.abs(),
        tolerance: PHASE_ABS_TOL,
        detail: format!("shielded: {}={:.9} while ab={:.9}", p.method, p.value, ab.value),
    };

    let mut out = Vec::new();
    if shielded {
        out.push(discrepancy("phase_field_momentum_vs_ab", fm));
        out.push(discrepancy("phase_energy_magnitude", energy));
    } else {
        out.push(CheckResult::within(
            "phase_field_momentum_vs_ab",
            (fm.value - ab.value).abs(),
            sigma_tol(fm, ab, PHASE_ABS_TOL),
            format!("field_momentum={:.9} ab={:.9}", fm.value, ab.value),
        ));
        let sign = if energy.value * ab.value > 0.0 {
            "same sign as ab"
        } else if energy.value * ab.value < 0.0 {
            "opposite sign to ab"
        } else {
            "zero"
        };
        out.push(CheckResult::within(
            "phase_energy_magnitude",
            (energy.value.abs() - ab.value.abs()).abs(),
            sigma_tol(energy, ab, PHASE_ABS_TOL),
            format!("energy={:.9} ab={:.9} ({sign})", energy.value, ab.value),
        ));
    }
    out.push(CheckResult::within(
        "phase_hidden_plus_field_momentum",
        (hidden.value + fm.value).abs(),
        sigma_tol(hidden, fm, PHASE_ABS_TOL),
        format!("hidden={:.9} field_momentum={:.9}", hidden.value, fm.value),
    ));
    if shielded {
        out.push(discrepancy("phase_hidden_vs_minus_ab", hidden));
    } else {
        out.push(CheckResult::within(
            "phase_hidden_vs_minus_ab",
            (hidden.value + ab.value).abs(),
            sigma_tol(hidden, ab, PHASE_ABS_TOL),
            format!("hidden={:.9} -ab={:.9}", hidden.value, -ab.value),
        ));
    }
    out
}

fn check_forces(ctx: &Ctx) -> Vec<CheckResult> {
    let times = ctx.scenario.force_times();
    let balance = guarded("force_balance", || {
        let mut worst: f64 = 0.0;
        for &t in &times {
            let a = force_on_currents(&ctx.traj, &ctx.sol, t, &ctx.units)?;
            let b = hidden_force(&ctx.traj, &ctx.sol, t, &ctx.units)?;
            worst = worst.max((a.value + b.value).norm());
        }
        Ok(CheckResult::within(
            "force_balance",
            worst,
            0.0,
            format!("max |F_currents + F_hidden| over {} times", times.len()),
        ))
    });
    let fd = guarded("force_finite_difference", || {
        let mut worst: f64 = 0.0;
        let mut magnitude: f64 = 0.0;
        for &t in &times {
            let a = force_on_currents(&ctx.traj, &ctx.sol, t, &ctx.units)?;
            worst = worst.max(a.residual);
            magnitude = magnitude.max(a.value.norm());
        }
        // closed form for a loop outside the solenoid: |q/c| omega Phi / (2 pi rho0)
        let tr = &ctx.traj;
        let expected = (ctx.units.charge / ctx.units.c).abs() * (tr.speed / tr.rho0) * enclosed_flux(&ctx.sol).abs()
            / (2.0 * PI * tr.rho0);
        let mag_dev = if expected > 0.0 { (magnitude - expected).abs() / expected } else { magnitude };
        Ok(CheckResult::within(
            "force_finite_difference",
            worst.max(mag_dev),
            FD_RESIDUAL_TOL,
            format!("|F|={magnitude:.9e} closed form={expected:.9e} max fd residual={worst:.2e}"),
        ))
    });
    vec![balance, fd]
}

fn check_flux_only_rho0(ctx: &Ctx) -> CheckResult {
    guarded("flux_only_rho0", || {
        let mut ab = Vec::new();
        let mut fm = Vec::new();
        for f in [1.5, 2.0, 4.0] {
            let traj = CircularTrajectory { rho0: f * ctx.sol.radius, ..ctx.traj };
            ab.push(phase_ab(&traj, &ctx.sol, &ctx.cfg, &ctx.units)?.value);
            fm.push(phase_field_momentum(&traj, &ctx.sol, &ctx.cfg, &ctx.units)?.value);
        }
        let spread = |v: &[f64]| {
            v.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - v.iter().fold(f64::INFINITY, |a, &b| a.min(b))
        };
        Ok(CheckResult::within(
            "flux_only_rho0",
            spread(&ab).max(spread(&fm)),
            PHASE_ABS_TOL,
            format!("rho0 = 1.5R, 2R, 4R: ab={ab:.9?} field_momentum={fm:.9?}"),
        ))
    })
}

fn check_flux_only_z0(ctx: &Ctx, base: Option<&[PhaseReport; 4]>) -> CheckResult {
    guarded("flux_only_z0", || {
        let base = base.ok_or_else(|| Error::invalid("base phases unavailable"))?;
        let traj = ctx.traj.with_z0(ctx.traj.z0 + 2.0 * ctx.sol.radius);
        let ab = phase_ab(&traj, &ctx.sol, &ctx.cfg, &ctx.units)?;
        let fm = phase_field_momentum(&traj, &ctx.sol, &ctx.cfg, &ctx.units)?;
        let dev = (ab.value - base[0].value).abs().max((fm.value - base[1].value).abs());
        Ok(CheckResult::within(
            "flux_only_z0",
            dev,
            PHASE_ABS_TOL,
            format!("z0 + 2R: ab={:.9} field_momentum={:.9}", ab.value, fm.value),
        ))
    })
}

fn check_winding_linearity(ctx: &Ctx, base: Option<&[PhaseReport; 4]>) -> CheckResult {
    guarded("winding_linearity", || {
        let base = base.ok_or_else(|| Error::invalid("base phases unavailable"))?;
        let traj = CircularTrajectory { windings: 3 * ctx.traj.windings, ..ctx.traj };
        let tripled = ctx.all_phases(&traj, &ctx.sol, &ctx.units)?;
        let dev = tripled.iter().zip(base).map(|(t, b)| (t.value - 3.0 * b.value).abs()).fold(0.0, f64::max);
        let values: Vec<f64> = tripled.iter().map(|p| p.value).collect();
        Ok(CheckResult::within(
            "winding_linearity",
            dev,
            3.0 * PHASE_ABS_TOL,
            format!("k = {}: {values:.9?}", traj.windings),
        ))
    })
}

fn check_speed_invariance(ctx: &Ctx, base: Option<&[PhaseReport; 4]>) -> CheckResult {
    guarded("speed_invariance", || {
        let base = base.ok_or_else(|| Error::invalid("base phases unavailable"))?;
        let traj = CircularTrajectory { speed: 0.5 * ctx.traj.speed, ..ctx.traj };
        let slow = ctx.all_phases(&traj, &ctx.sol, &ctx.units)?;
        let dev = slow.iter().zip(base).map(|(s, b)| (s.value - b.value).abs()).fold(0.0, f64::max);
        let values: Vec<f64> = slow.iter().map(|p| p.value).collect();
        Ok(CheckResult::within("speed_invariance", dev, PHASE_ABS_TOL, format!("speed {}: {values:.9?}", traj.speed)))
    })
}

fn check_linearity(ctx: &Ctx, base: Option<&[PhaseReport; 4]>) -> CheckResult {
    guarded("charge_field_linearity", || {
        let base = base.ok_or_else(|| Error::invalid("base phases unavailable"))?;
        let units2 = UnitSystem { charge: 2.0 * ctx.units.charge, ..ctx.units };
        let sol2 = ctx.sol.with_field(2.0 * ctx.sol.b_interior);
        let q2 = phase_field_momentum(&ctx.traj, &ctx.sol, &ctx.cfg, &units2)?;
        let b2 = phase_field_momentum(&ctx.traj, &sol2, &ctx.cfg, &ctx.units)?;
        let qa = phase_ab(&ctx.traj, &ctx.sol, &ctx.cfg, &units2)?;
        let ba = phase_ab(&ctx.traj, &sol2, &ctx.cfg, &ctx.units)?;
        let dev = [
            (q2.value, base[1].value),
            (b2.value, base[1].value),
            (qa.value, base[0].value),
            (ba.value, base[0].value),
        ]
        .iter()
        .map(|(doubled, single)| (doubled - 2.0 * single).abs())
        .fold(0.0, f64::max);
        Ok(CheckResult::within(
            "charge_field_linearity",
            dev,
            2.0 * PHASE_ABS_TOL,
            format!("2q: {:.9}/{:.9}  2B: {:.9}/{:.9}", qa.value, q2.value, ba.value, b2.value),
        ))
    })
}

fn check_shielded_contrast(ctx: &Ctx) -> CheckResult {
    guarded("shielded_contrast", || {
        let sol = ctx.sol.shielded(true);
        let ab = phase_ab(&ctx.traj, &sol, &ctx.cfg, &ctx.units)?;
        let fm = phase_field_momentum(&ctx.traj, &sol, &ctx.cfg, &ctx.units)?;
        let expected = f64::from(ctx.traj.windings) * ctx.units.phase_per_flux() * enclosed_flux(&sol);
        let dev = fm.value.abs().max((ab.value - expected).abs());
        Ok(CheckResult::within(
            "shielded_contrast",
            dev,
            PHASE_ABS_TOL,
            format!("shielded: field_momentum={:.9} ab={:.9}", fm.value, ab.value),
        ))
    })
}

/// Radical inverse of `i` in base `b`, for deterministic sample points.
fn halton(mut i: usize, b: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Deterministic (charge, field point) samples with the charge outside the
/// clearance radius and the field point inside the solenoid.
pub fn triple_product_samples(sol: &SolenoidSpec, units: &UnitSystem, n: usize) -> Vec<(PointCharge, Vec3)> {
    const BASES: [usize; 9] = [2, 3, 5, 7, 11, 13, 17, 19, 23];
    let r = sol.radius;
    (1..=n)
        .map(|i| {
            let u: [f64; 9] = std::array::from_fn(|d| halton(i, BASES[d]));
            let rho = CLEARANCE_FACTOR * r + u[0] * 4.0 * r;
            let phi = 2.0 * PI * u[1];
            let pos = Vec3::new(rho * phi.cos(), rho * phi.sin(), (u[2] - 0.5) * 6.0 * r);
            let vel = Vec3::new(u[3] - 0.5, u[4] - 0.5, u[5] - 0.5) * (0.1 * units.c);
            let rho_p = r * u[6].sqrt() * 0.999;
            let phi_p = 2.0 * PI * u[7];
            let rp = Vec3::new(rho_p * phi_p.cos(), rho_p * phi_p.sin(), (u[8] - 0.5) * 6.0 * r);
            let charge = PointCharge { q: units.charge, position: pos, velocity: vel };
            (charge, rp)
        })
        .collect()
}

fn check_triple_product(ctx: &Ctx) -> CheckResult {
    guarded("triple_product_identity", || {
        let mut worst: f64 = 0.0;
        for (charge, rp) in triple_product_samples(&ctx.sol, &ctx.units, TRIPLE_PRODUCT_SAMPLES) {
            let (lhs, rhs) = triple_product_pair(&charge, rp, &ctx.sol, &ctx.units)?;
            let e = crate::geometry::coulomb_field(&charge, rp, None)?;
            let scale = e.norm() * interior_b_field(&ctx.sol, rp).norm() * charge.velocity.norm();
            let rel = if scale > 0.0 { (lhs - rhs).abs() / scale } else { (lhs - rhs).abs() };
            worst = worst.max(rel);
        }
        Ok(CheckResult::within(
            "triple_product_identity",
            worst,
            TRIPLE_PRODUCT_REL_TOL,
            format!("(E x B_sol).v vs c B_el.B_sol at {TRIPLE_PRODUCT_SAMPLES} samples"),
        ))
    })
}
