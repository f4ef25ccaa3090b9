//! Periodic-box pseudospectral solver for the 3D incompressible Euler
//! equations, with Lagrangian particle tracking and a suite of blow-up
//! criterion diagnostics built on the pressure Hessian.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: grids, real/spectral fields, transforms and Fourier
//!   multipliers (derivatives, dealiasing, Leray projection, inverse
//!   Laplacian).
//! * [`solver`]: RK4 time integration of the velocity form and the
//!   catalogue of analytic initial conditions.
//! * [`pressure`]: pressure, its Hessian through the Riesz-multiplier
//!   identity, the `mu` alignment field, and (ball-restricted) sup norms.
//! * [`lagrangian`]: trajectories, deformation gradients and residuals of
//!   the Lagrangian vorticity identities.
//! * [`criteria`]: quadrature of the criterion functionals with error
//!   certificates.
//! * [`io`]: run configuration, orchestration and file formats.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod error;
pub mod io;
pub mod lagrangian;
pub mod pressure;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
