//! Particle trajectories, deformation gradients and checks of the
//! Lagrangian vorticity identities.

mod gronwall;
mod particles;
mod residuals;
mod sampler;

pub use gronwall::{gronwall_bound_check, gronwall_margins, GronwallCheck, SAMPLING_ROUNDOFF};
pub use particles::{
    det, lattice_labels, mat_mul, mat_vec, norm, vorticity_max_location, HistorySample,
    ParticleSet, Snapshot, IDENTITY,
};
pub use residuals::{
    acceleration_residual, cauchy_residual, cauchy_residual_at, residual_order, residual_series,
    second_derivative_residual, CauchyReport, OrderCheck, ResidualKind, ResidualSeries,
    CAUCHY_FLOOR,
};
pub use sampler::{
    trilinear, FourierField, Mat3, PressureJet, PressureSampler, Sampling, ScalarJet, Stencil,
    VelocityJet, VelocitySampler,
};
