//! Phase computations, momentum identities, forces on the solenoid and the
//! consistency harness that ties them together.

mod forces;
mod momentum;
mod phases;
pub mod suite;
mod trajectory;

pub use forces::{force_on_currents, hidden_force, ForceReport, FD_STEP_FRACTION, FD_WARN_RESIDUAL};
pub use momentum::{
    field_momentum, hidden_momentum_total, interference_energy, magnetization_density, triple_product_pair,
    verify_momentum_identity, MomentumIdentityResidual,
};
pub use phases::{
    compute_phase, phase_ab, phase_field_momentum, phase_field_momentum_with, phase_hidden_momentum,
    phase_hidden_momentum_with, phase_interference_energy, phase_interference_energy_with, Method, PathStrategy,
    PhaseReport,
};
pub use suite::{run_consistency_suite, CheckResult, CheckStatus, SuiteReport};
pub use trajectory::{CircularTrajectory, CLEARANCE_FACTOR};
