use super::norms::sym_operator_norm;
use super::PressurePack;
use crate::solver::GridVelocity;
use crate::spectral::{Layout, RealField, SpectralField};

/// Relative threshold below which `|ω|` or `|Sξ|` is treated as zero.
pub const DEGENERACY_EPS: f64 = 1e-8;

/// `μ = ζ·Pξ` with `ξ = ω/|ω|`, `ζ = Sξ/|Sξ|` and `P = D²p`.
#[derive(Clone, Debug)]
pub struct MuField {
    pub mu: RealField,
    /// `true` where `ξ` and `ζ` are defined.
    pub valid: Vec<bool>,
    /// Every node was masked; `mu` is then reported as zero.
    pub degenerate: bool,
}

impl MuField {
    /// Sup of `|μ|` over valid nodes, 0 for a degenerate field.
    pub fn sup(&self) -> f64 {
        self.mu
            .component(0)
            .iter()
            .zip(&self.valid)
            .filter(|(_, ok)| **ok)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }
}

pub fn mu_field(u_hat: &SpectralField, pack: &PressurePack) -> MuField {
    mu_field_from(&GridVelocity::from_spectral(u_hat), pack)
}

pub fn mu_field_from(vel: &GridVelocity, pack: &PressurePack) -> MuField {
    let grid = vel.u.grid();
    let np = grid.points();

    let mut omega = vec![[0.0; 3]; np];
    let mut strain = vec![[[0.0; 3]; 3]; np];
    let mut omega_sup = 0.0f64;
    let mut strain_sup = 0.0f64;
    for idx in 0..np {
        let j = vel.jacobian_at(idx);
        let w = [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]];
        let mut s = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                s[a][b] = 0.5 * (j[a][b] + j[b][a]);
            }
        }
        omega_sup = omega_sup.max(norm3(w));
        strain_sup = strain_sup.max(sym_operator_norm(s));
        omega[idx] = w;
        strain[idx] = s;
    }

    let mut mu = RealField::zeros(grid, Layout::Scalar);
    let mut valid = vec![false; np];
    let w_floor = DEGENERACY_EPS * omega_sup;
    let s_floor = DEGENERACY_EPS * strain_sup;
    for idx in 0..np {
        let w = omega[idx];
        let wn = norm3(w);
        if wn == 0.0 || wn < w_floor {
            continue;
        }
        let xi = w.map(|c| c / wn);
        let sxi = matvec(&strain[idx], xi);
        let sn = norm3(sxi);
        if sn == 0.0 || sn < s_floor {
            continue;
        }
        let zeta = sxi.map(|c| c / sn);
        let pxi = matvec(&pack.hess.tensor_at(idx), xi);
        mu.component_mut(0)[idx] = dot(zeta, pxi);
        valid[idx] = true;
    }
    let degenerate = !valid.iter().any(|v| *v);
    MuField { mu, valid, degenerate }
}

#[inline]
fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn matvec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}
