use crate::criteria::NormSample;
use crate::error::Result;
use crate::lagrangian::{mat_vec, norm};
use crate::pressure::{general_operator_norm, mu_field_from, pressure_pack_from, sup_norm, BallSpec, PressurePack};
use crate::solver::{energy, GridVelocity};
use crate::spectral::{Layout, RealField, SpectralField};

/// Vorticity on the grid from the velocity gradient.
pub fn vorticity_grid(vel: &GridVelocity) -> RealField {
    let grid = vel.u.grid();
    let mut w = RealField::zeros(grid, Layout::Vector);
    for idx in 0..grid.points() {
        let j = vel.jacobian_at(idx);
        let v = [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]];
        for (c, x) in v.iter().enumerate() {
            w.component_mut(c)[idx] = *x;
        }
    }
    w
}

/// `max |ω|` and `max |(ω·∇)u|` over the grid.
pub fn vorticity_and_stretching_sup(vel: &GridVelocity) -> (f64, f64) {
    let grid = vel.u.grid();
    let mut out = (0.0f64, 0.0f64);
    for idx in 0..grid.points() {
        let j = vel.jacobian_at(idx);
        let w = [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]];
        out.0 = out.0.max(norm(w));
        out.1 = out.1.max(norm(mat_vec(&j, w)));
    }
    out
}

/// Everything computed when the flow is sampled at one time.
pub struct FlowSample {
    pub norms: NormSample,
    pub velocity: GridVelocity,
    pub pressure: PressurePack,
}

pub fn sample_flow(u_hat: &SpectralField, t: f64, balls: &[BallSpec]) -> Result<FlowSample> {
    let velocity = GridVelocity::from_spectral(u_hat);
    let pressure = pressure_pack_from(&velocity)?;
    let omega = vorticity_grid(&velocity);
    let grid = u_hat.grid();
    let gradu = (0..grid.points())
        .map(|i| general_operator_norm(velocity.jacobian_at(i)))
        .fold(0.0, f64::max);
    let mu = mu_field_from(&velocity, &pressure).sup();
    let mut ball_norms = Vec::with_capacity(balls.len());
    for b in balls {
        ball_norms.push([
            sup_norm(&pressure.hess, Some(b))?,
            sup_norm(&omega, Some(b))?,
            sup_norm(&velocity.u, Some(b))?,
        ]);
    }
    let norms = NormSample {
        t,
        hess: sup_norm(&pressure.hess, None)?,
        vort: sup_norm(&omega, None)?,
        gradu,
        mu,
        energy: energy(u_hat),
        balls: ball_norms,
    };
    Ok(FlowSample {
        norms,
        velocity,
        pressure,
    })
}
