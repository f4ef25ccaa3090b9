//! Pressure, pressure Hessian and the fields and norms derived from them.
//!
//! Taking the divergence of the momentum equation gives `Δp = −Q` with
//! `Q = ∂_k u_m ∂_m u_k`, so `∂_i∂_j p = R_i R_j Q` where `R_j` is the Riesz
//! transform with symbol `i k_j/|k|`. On the periodic box this is the
//! diagonal multiplier `−k_i k_j/|k|²` applied to `Q̂`.

mod mu;
mod norms;

pub use mu::{mu_field, mu_field_from, MuField, DEGENERACY_EPS};
pub use norms::{
    ball_nodes, general_operator_norm, periodic_distance, pointwise_norm, sup_norm,
    sup_norm_masked, sym_eigenvalues, sym_operator_norm, BallSpec,
};

use crate::error::{Error, Result};
use crate::solver::GridVelocity;
use crate::spectral::{
    dealias_in_place, derivative, forward, inverse, inverse_laplacian, sym_index, Layout,
    RealField, SpectralField,
};

/// Relative tolerance on the mean of `Q`.
pub const GAUGE_TOL: f64 = 1e-10;

/// Agreement required between the multiplier and double-derivative routes.
pub const HESSIAN_PATH_TOL: f64 = 1e-12;

/// Pressure (mean-zero gauge), its gradient and Hessian, and the source.
#[derive(Clone, Debug)]
pub struct PressurePack {
    pub p: RealField,
    pub grad: RealField,
    pub hess: RealField,
    /// Dealiased `Q = ∂_k u_m ∂_m u_k` on the grid.
    pub source: RealField,
    pub p_hat: SpectralField,
    /// Largest difference between the two Hessian routes, relative to
    /// the largest Hessian coefficient.
    pub path_discrepancy: f64,
}

/// `Q = tr(J²)` on the grid, where `J_ij = ∂u_i/∂x_j`.
pub fn velocity_gradient_contraction(vel: &GridVelocity) -> RealField {
    let grid = vel.u.grid();
    let mut q = RealField::zeros(grid, Layout::Scalar);
    for (idx, v) in q.component_mut(0).iter_mut().enumerate() {
        let j = vel.jacobian_at(idx);
        *v = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .map(|(a, b)| j[a][b] * j[b][a])
            .sum();
    }
    q
}

/// Hessian coefficients via `−k_i k_j/|k|²·Q̂`.
fn hessian_by_multiplier(q_hat: &SpectralField) -> SpectralField {
    let grid = q_hat.grid();
    let ns = grid.spectral_len();
    let mut out = SpectralField::zeros(grid, Layout::SymTensor);
    let src = q_hat.component(0);
    let data = out.data_mut();
    SpectralField::for_each_mode(grid, |off, k| {
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if k2 == 0.0 {
            return;
        }
        for i in 0..3 {
            for j in i..3 {
                let sym = -(k[i] as f64) * (k[j] as f64) / k2;
                data[sym_index(i, j) * ns + off] = src[off] * sym;
            }
        }
    });
    out
}

/// Gradient and Hessian coefficients of a scalar by spectral derivatives.
pub fn pressure_derivatives(p_hat: &SpectralField) -> (SpectralField, SpectralField) {
    let grid = p_hat.grid();
    let mut grad = SpectralField::zeros(grid, Layout::Vector);
    let mut hess = SpectralField::zeros(grid, Layout::SymTensor);
    for i in 0..3 {
        let di = derivative(p_hat, i);
        grad.component_mut(i).copy_from_slice(di.component(0));
        for j in i..3 {
            let dij = derivative(&di, j);
            hess.component_mut(sym_index(i, j)).copy_from_slice(dij.component(0));
        }
    }
    (grad, hess)
}

pub fn pressure_pack(u_hat: &SpectralField) -> Result<PressurePack> {
    pressure_pack_from(&GridVelocity::from_spectral(u_hat))
}

/// Build the pack from already transformed velocity fields.
pub fn pressure_pack_from(vel: &GridVelocity) -> Result<PressurePack> {
    let q = velocity_gradient_contraction(vel);
    let mut q_hat = forward(&q);
    dealias_in_place(&mut q_hat);

    let mean = q_hat.component(0)[0].norm();
    let norm = q_hat.mean_square().sqrt();
    if mean > GAUGE_TOL * norm {
        return Err(Error::Gauge { mean, norm });
    }
    // Exact zero mean so the Poisson solve sees a solvable source.
    q_hat.component_mut(0)[0] = num_complex::Complex64::new(0.0, 0.0);

    let p_hat = inverse_laplacian(&q_hat)?;
    let (grad_hat, hess_hat) = pressure_derivatives(&p_hat);
    let hess_mult = hessian_by_multiplier(&q_hat);

    let scale = hess_hat.max_abs();
    let diff = hess_hat
        .data()
        .iter()
        .zip(hess_mult.data())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let path_discrepancy = if scale > 0.0 { diff / scale } else { diff };
    if path_discrepancy > HESSIAN_PATH_TOL {
        return Err(Error::Consistency(format!(
            "Hessian routes differ by {path_discrepancy:e} (relative)"
        )));
    }

    Ok(PressurePack {
        p: inverse(&p_hat),
        grad: inverse(&grad_hat),
        hess: inverse(&hess_hat),
        source: inverse(&q_hat),
        p_hat,
        path_discrepancy,
    })
}

impl PressurePack {
    /// `max |tr(D²p) + Q|` over the grid.
    pub fn poisson_residual(&self) -> f64 {
        let np = self.p.grid().points();
        (0..np)
            .map(|i| {
                let h = self.hess.tensor_at(i);
                (h[0][0] + h[1][1] + h[2][2] + self.source.at(0, i)).abs()
            })
            .fold(0.0, f64::max)
    }
}
