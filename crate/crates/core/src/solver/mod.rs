//! RK4 time integration of the incompressible Euler equations in velocity
//! form, `u_t = −P[(u·∇)u]`, with the pressure gradient absorbed by the
//! Leray projection `P`.

mod initial;
mod state;

pub use initial::{make_initial, InitialCondition};
pub use state::{read_state, write_state, SolverState};

use std::array;

use crate::error::{Error, Result};
use crate::spectral::{
    dealias_in_place, derivative, forward, inverse, leray_project_in_place, Layout, RealField,
    SpectralField,
};

/// Floor on `max|u|` in the CFL formula.
pub const CFL_VELOCITY_FLOOR: f64 = 1e-12;

/// Growth of `max|u|` over its initial value treated as instability.
pub const INSTABILITY_GROWTH: f64 = 1e3;

/// Velocity and its gradient sampled on the grid.
///
/// `grad[j].component(i)` holds `∂u_i/∂x_j`.
#[derive(Clone, Debug)]
pub struct GridVelocity {
    pub u: RealField,
    pub grad: [RealField; 3],
}

impl GridVelocity {
    pub fn from_spectral(u_hat: &SpectralField) -> Self {
        Self {
            u: inverse(u_hat),
            grad: array::from_fn(|j| inverse(&derivative(u_hat, j))),
        }
    }

    /// Jacobian `J[i][j] = ∂u_i/∂x_j` at node `idx`.
    #[inline]
    pub fn jacobian_at(&self, idx: usize) -> [[f64; 3]; 3] {
        let mut jac = [[0.0; 3]; 3];
        for (i, row) in jac.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.grad[j].at(i, idx);
            }
        }
        jac
    }
}

fn nonlinear_term(fields: &GridVelocity) -> RealField {
    let grid = fields.u.grid();
    let np = grid.points();
    let mut adv = RealField::zeros(grid, Layout::Vector);
    for i in 0..3 {
        let out = adv.component_mut(i);
        for j in 0..3 {
            let uj = fields.u.component(j);
            let dj = &fields.grad[j].component(i)[..np];
            for ((o, a), b) in out.iter_mut().zip(uj).zip(dj) {
                *o += a * b;
            }
        }
    }
    adv
}

/// Tendency `−P[(u·∇)u]`, dealiased, plus the grid fields used to build it.
pub fn rhs_with_fields(u_hat: &SpectralField) -> Result<(SpectralField, GridVelocity)> {
    if u_hat.layout() != Layout::Vector {
        return Err(Error::Dimension("velocity must be a vector field".into()));
    }
    let fields = GridVelocity::from_spectral(u_hat);
    let adv = nonlinear_term(&fields);
    if !adv.is_finite() {
        return Err(Error::Instability {
            t: f64::NAN,
            reason: "non-finite value in the nonlinear term".into(),
        });
    }
    let mut tendency = forward(&adv);
    dealias_in_place(&mut tendency);
    leray_project_in_place(&mut tendency);
    tendency.scale(-1.0);
    Ok((tendency, fields))
}

pub fn rhs(u_hat: &SpectralField) -> Result<SpectralField> {
    rhs_with_fields(u_hat).map(|(t, _)| t)
}

/// Velocity states seen by the four RK4 stages: `t`, `t+dt/2`, `t+dt/2`,
/// `t+dt`. Grid fields are kept only when requested.
#[derive(Clone, Debug)]
pub struct StageFields {
    pub u_hat: [SpectralField; 4],
    pub grid: Option<[GridVelocity; 4]>,
}

fn rk4(u: &SpectralField, dt: f64, keep_grid: bool) -> Result<(SpectralField, StageFields)> {
    let (k1, g1) = rhs_with_fields(u)?;
    let mut s2 = u.clone();
    s2.axpy(0.5 * dt, &k1);
    let (k2, g2) = rhs_with_fields(&s2)?;
    let mut s3 = u.clone();
    s3.axpy(0.5 * dt, &k2);
    let (k3, g3) = rhs_with_fields(&s3)?;
    let mut s4 = u.clone();
    s4.axpy(dt, &k3);
    let (k4, g4) = rhs_with_fields(&s4)?;

    let mut next = u.clone();
    next.axpy(dt / 6.0, &k1);
    next.axpy(dt / 3.0, &k2);
    next.axpy(dt / 3.0, &k3);
    next.axpy(dt / 6.0, &k4);
    leray_project_in_place(&mut next);

    let stages = StageFields {
        u_hat: [u.clone(), s2, s3, s4],
        grid: keep_grid.then_some([g1, g2, g3, g4]),
    };
    Ok((next, stages))
}

/// One classical RK4 step followed by re-projection.
pub fn step(state: &SolverState, dt: f64) -> Result<SolverState> {
    step_with_stages(state, dt, false).map(|(s, _)| s)
}

pub fn step_with_stages(
    state: &SolverState,
    dt: f64,
    keep_grid: bool,
) -> Result<(SolverState, StageFields)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    let (u_hat, stages) = rk4(&state.u_hat, dt, keep_grid).map_err(|e| match e {
        Error::Instability { reason, .. } => Error::Instability { t: state.t, reason },
        other => other,
    })?;
    if !u_hat.is_finite() {
        return Err(Error::Instability {
            t: state.t + dt,
            reason: "non-finite velocity after step".into(),
        });
    }
    Ok((
        SolverState {
            u_hat,
            t: state.t + dt,
            step_index: state.step_index + 1,
            dt,
        },
        stages,
    ))
}

/// Pointwise maximum of `|u|` over the grid.
pub fn velocity_max(u: &RealField) -> f64 {
    let np = u.grid().points();
    (0..np)
        .map(|i| {
            let v = u.vec_at(i);
            (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
        })
        .fold(0.0, f64::max)
}

/// `dt = cfl·h / max(|u|_∞, 1e-12)`, capped by `dt_max`.
pub fn cfl_dt(u: &RealField, cfl: f64, dt_max: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::Config(format!("cfl must lie in (0, 1], got {cfl}")));
    }
    let umax = velocity_max(u).max(CFL_VELOCITY_FLOOR);
    Ok((cfl * u.grid().h() / umax).min(dt_max))
}

/// Kinetic energy `½⟨|u|²⟩` (grid average).
pub fn energy(u_hat: &SpectralField) -> f64 {
    0.5 * u_hat.mean_square()
}

/// Helicity `⟨u·ω⟩` (grid average).
pub fn helicity(u_hat: &SpectralField) -> f64 {
    u_hat.inner(&crate::spectral::curl(u_hat))
}

/// Largest `|k·û(k)|` relative to the largest coefficient magnitude.
pub fn divergence_relative(u_hat: &SpectralField) -> f64 {
    let div = crate::spectral::divergence(u_hat);
    let scale = u_hat.max_abs();
    if scale == 0.0 {
        0.0
    } else {
        div.max_abs() / scale
    }
}

/// How the step size is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepControl {
    Fixed(f64),
    Cfl { cfl: f64, dt_max: f64 },
}

/// Advances a [`SolverState`] and enforces the instability guard.
#[derive(Clone, Debug)]
pub struct Solver {
    pub state: SolverState,
    pub control: StepControl,
    initial_umax: f64,
}

impl Solver {
    pub fn new(state: SolverState, control: StepControl) -> Result<Self> {
        match control {
            StepControl::Fixed(dt) if !(dt > 0.0) => {
                return Err(Error::Config(format!("dt must be positive, got {dt}")))
            }
            StepControl::Cfl { cfl, dt_max } if !(cfl > 0.0 && cfl <= 1.0 && dt_max > 0.0) => {
                return Err(Error::Config(format!("invalid cfl {cfl} / dt_max {dt_max}")))
            }
            _ => {}
        }
        let initial_umax = velocity_max(&inverse(&state.u_hat));
        Ok(Self {
            state,
            control,
            initial_umax,
        })
    }

    pub fn initial_umax(&self) -> f64 {
        self.initial_umax
    }

    /// Step size for the next step, clipped so `t` does not pass `t_end`.
    pub fn next_dt(&self, t_end: f64) -> Result<f64> {
        let dt = match self.control {
            StepControl::Fixed(dt) => dt,
            StepControl::Cfl { cfl, dt_max } => cfl_dt(&inverse(&self.state.u_hat), cfl, dt_max)?,
        };
        let remaining = t_end - self.state.t;
        // Absorb a final sliver rather than taking a near-zero step.
        Ok(if remaining <= dt * (1.0 + 1e-9) { remaining } else { dt })
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        self.step_with_stages(dt, false).map(|_| ())
    }

    pub fn step_with_stages(&mut self, dt: f64, keep_grid: bool) -> Result<StageFields> {
        let (next, stages) = step_with_stages(&self.state, dt, keep_grid)?;
        let umax = velocity_max(&inverse(&next.u_hat));
        if umax > INSTABILITY_GROWTH * self.initial_umax.max(CFL_VELOCITY_FLOOR) {
            return Err(Error::Instability {
                t: next.t,
                reason: format!(
                    "max|u| = {umax:e} exceeds {INSTABILITY_GROWTH}x the initial {:e}",
                    self.initial_umax
                ),
            });
        }
        self.state = next;
        Ok(stages)
    }
}
