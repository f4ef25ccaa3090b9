use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, Layout, RealField};

/// Ball `B(x₀, ρ)` in the periodic box; `0 < ρ < π` so it never wraps onto
/// itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallSpec {
    center: [f64; 3],
    radius: f64,
}

impl BallSpec {
    pub fn new(center: [f64; 3], radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < PI) {
            return Err(Error::Config(format!("ball radius must lie in (0, π), got {radius}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("ball center must be finite".into()));
        }
        let center = center.map(|c| c.rem_euclid(2.0 * PI));
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> [f64; 3] {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, x: [f64; 3]) -> bool {
        periodic_distance(self.center, x) < self.radius
    }

    /// Whether `self ⊆ other` as point sets.
    pub fn is_inside(&self, other: &BallSpec) -> bool {
        periodic_distance(self.center, other.center) + self.radius <= other.radius
    }
}

/// Minimum-image distance on the `2π`-periodic cube.
pub fn periodic_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        let mut d = (a[i] - b[i]).rem_euclid(2.0 * PI);
        if d > PI {
            d = 2.0 * PI - d;
        }
        s += d * d;
    }
    s.sqrt()
}

/// Indices of the grid nodes strictly inside `ball`.
pub fn ball_nodes(grid: GridSpec, ball: &BallSpec) -> Result<Vec<usize>> {
    let nodes: Vec<usize> = (0..grid.points()).filter(|&i| ball.contains(grid.coords(i))).collect();
    if nodes.is_empty() {
        return Err(Error::EmptyBall);
    }
    Ok(nodes)
}

/// Eigenvalues of a symmetric 3×3 matrix in descending order
/// (closed-form trigonometric solution).
pub fn sym_eigenvalues(m: [[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    if p1 == 0.0 {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(|a, b| b.total_cmp(a));
        return d;
    }
    let a = m[0][0] - q;
    let b = m[1][1] - q;
    let c = m[2][2] - q;
    let p2 = a * a + b * b + c * c + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return [q; 3];
    }
    let inv = 1.0 / p;
    let (b00, b11, b22) = (a * inv, b * inv, c * inv);
    let (b01, b02, b12) = (m[0][1] * inv, m[0][2] * inv, m[1][2] * inv);
    let det = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02)
        + b02 * (b01 * b12 - b11 * b02);
    let r = (0.5 * det).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    [e1, e2, e3]
}

/// Spectral norm of a symmetric matrix: largest eigenvalue magnitude.
pub fn sym_operator_norm(m: [[f64; 3]; 3]) -> f64 {
    let e = sym_eigenvalues(m);
    e[0].abs().max(e[2].abs()).max(e[1].abs())
}

/// Spectral norm of a general 3×3 matrix, `sqrt(λ_max(MᵀM))`.
pub fn general_operator_norm(m: [[f64; 3]; 3]) -> f64 {
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = (0..3).map(|k| m[k][i] * m[k][j]).sum();
        }
    }
    sym_eigenvalues(g)[0].max(0.0).sqrt()
}

/// Norm of a field value at one node: absolute value, Euclidean length, or
/// operator norm depending on the layout.
#[inline]
pub fn pointwise_norm(field: &RealField, idx: usize) -> f64 {
    match field.layout() {
        Layout::Scalar => field.at(0, idx).abs(),
        Layout::Vector => {
            let v = field.vec_at(idx);
            (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
        }
        Layout::SymTensor => sym_operator_norm(field.tensor_at(idx)),
    }
}

/// Maximum pointwise norm over all nodes or over the nodes inside `ball`.
pub fn sup_norm(field: &RealField, ball: Option<&BallSpec>) -> Result<f64> {
    let grid = field.grid();
    Ok(match ball {
        None => (0..grid.points()).map(|i| pointwise_norm(field, i)).fold(0.0, f64::max),
        Some(b) => ball_nodes(grid, b)?
            .into_iter()
            .map(|i| pointwise_norm(field, i))
            .fold(0.0, f64::max),
    })
}

/// As [`sup_norm`] but skipping nodes where `valid` is false. Returns
/// `None` when every candidate node is masked.
pub fn sup_norm_masked(field: &RealField, valid: &[bool], ball: Option<&BallSpec>) -> Result<Option<f64>> {
    let grid = field.grid();
    let nodes: Vec<usize> = match ball {
        None => (0..grid.points()).collect(),
        Some(b) => ball_nodes(grid, b)?,
    };
    Ok(nodes
        .into_iter()
        .filter(|&i| valid[i])
        .map(|i| pointwise_norm(field, i))
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v)))))
}
