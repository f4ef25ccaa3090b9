//! Diagonal Fourier multipliers acting on [`SpectralField`]s.

use num_complex::Complex64;

use super::field::{Layout, SpectralField};
use super::grid::GridSpec;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectral derivative `∂/∂x_axis` of every component. Nyquist modes along
/// the differentiated axis are zeroed.
pub fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    assert!(axis < 3, "axis must be 0, 1 or 2");
    let grid = f.grid();
    let nyq = grid.nyquist();
    let ns = grid.spectral_len();
    let mut out = f.clone();
    SpectralField::for_each_mode(grid, |off, k| {
        let ka = k[axis];
        let factor = if ka.abs() == nyq { ZERO } else { Complex64::new(0.0, ka as f64) };
        for c in 0..f.components() {
            out.data_mut()[c * ns + off] *= factor;
        }
    });
    out
}

/// Gradient of a scalar field.
pub fn gradient(f: &SpectralField) -> SpectralField {
    assert_eq!(f.layout(), Layout::Scalar);
    let grid = f.grid();
    let mut out = SpectralField::zeros(grid, Layout::Vector);
    for axis in 0..3 {
        let d = derivative(f, axis);
        out.component_mut(axis).copy_from_slice(d.component(0));
    }
    out
}

/// Divergence of a vector field.
pub fn divergence(u: &SpectralField) -> SpectralField {
    assert_eq!(u.layout(), Layout::Vector);
    let grid = u.grid();
    let mut out = SpectralField::zeros(grid, Layout::Scalar);
    for axis in 0..3 {
        let d = derivative(u, axis);
        for (o, v) in out.component_mut(0).iter_mut().zip(d.component(axis)) {
            *o += v;
        }
    }
    out
}

/// Curl of a vector field.
pub fn curl(u: &SpectralField) -> SpectralField {
    assert_eq!(u.layout(), Layout::Vector);
    let grid = u.grid();
    let d: Vec<SpectralField> = (0..3).map(|a| derivative(u, a)).collect();
    let mut out = SpectralField::zeros(grid, Layout::Vector);
    // ω_i = ∂_j u_k − ∂_k u_j for cyclic (i, j, k)
    for i in 0..3 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        let (a, b) = (d[j].component(k), d[k].component(j));
        for (o, (x, y)) in out.component_mut(i).iter_mut().zip(a.iter().zip(b)) {
            *o = x - y;
        }
    }
    out
}

/// Whether a wavevector survives the 2/3 rule.
#[inline]
pub fn retained(grid: GridSpec, k: [i64; 3]) -> bool {
    let cut = grid.dealias_cutoff();
    k.iter().all(|c| c.abs() <= cut)
}

/// Zero every mode with `|k_axis| > floor(n/3)` on any axis.
pub fn dealias_in_place(f: &mut SpectralField) {
    let grid = f.grid();
    let ns = grid.spectral_len();
    let nc = f.components();
    let data = f.data_mut();
    SpectralField::for_each_mode(grid, |off, k| {
        if !retained(grid, k) {
            for c in 0..nc {
                data[c * ns + off] = ZERO;
            }
        }
    });
}

pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

/// Leray projection onto divergence-free fields:
/// `û(k) ← û(k) − k (k·û(k)) / |k|²` for `k ≠ 0`.
///
/// Modes carrying a Nyquist wavenumber on any axis are zeroed: their
/// conjugate partner is not representable, so no consistent projection exists.
pub fn leray_project_in_place(u: &mut SpectralField) {
    assert_eq!(u.layout(), Layout::Vector);
    let grid = u.grid();
    let nyq = grid.nyquist();
    let ns = grid.spectral_len();
    let data = u.data_mut();
    SpectralField::for_each_mode(grid, |off, k| {
        if k.iter().any(|c| c.abs() == nyq) {
            for c in 0..3 {
                data[c * ns + off] = ZERO;
            }
            return;
        }
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if k2 == 0.0 {
            return;
        }
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        let kdotu = kf[0] * data[off] + kf[1] * data[ns + off] + kf[2] * data[2 * ns + off];
        let s = kdotu / k2;
        for c in 0..3 {
            data[c * ns + off] -= s * kf[c];
        }
    });
}

pub fn leray_project(u: &SpectralField) -> SpectralField {
    let mut out = u.clone();
    leray_project_in_place(&mut out);
    out
}

/// Relative tolerance on the mean of a Poisson source.
pub const SOLVABILITY_TOL: f64 = 1e-10;

/// Solve `−Δg = f` with the mean-zero gauge.
pub fn inverse_laplacian(f: &SpectralField) -> Result<SpectralField> {
    if f.layout() != Layout::Scalar {
        return Err(Error::Dimension("inverse Laplacian needs a scalar field".into()));
    }
    let mean = f.component(0)[0].norm();
    let norm = f.mean_square().sqrt();
    if mean > SOLVABILITY_TOL * norm {
        return Err(Error::NonSolvableSource { mean, norm });
    }
    let grid = f.grid();
    let mut out = f.clone();
    let data = out.data_mut();
    SpectralField::for_each_mode(grid, |off, k| {
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        data[off] = if k2 == 0.0 { ZERO } else { data[off] / k2 };
    });
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// Separable trigonometric monomial `amplitude · T₁(k₁x) T₂(k₂y) T₃(k₃z)`.
#[derive(Clone, Copy, Debug)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub modes: [(Trig, i64); 3],
}

impl TrigTerm {
    pub fn new(amplitude: f64, modes: [(Trig, i64); 3]) -> Self {
        Self { amplitude, modes }
    }

    /// Largest absolute wavenumber along any axis.
    pub fn max_wavenumber(&self) -> i64 {
        self.modes.iter().map(|(_, k)| k.abs()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        self.modes.iter().zip(x).fold(self.amplitude, |acc, (&(t, k), xi)| {
            acc * match t {
                Trig::Cos => (k as f64 * xi).cos(),
                Trig::Sin => (k as f64 * xi).sin(),
            }
        })
    }
}

/// Add the exact Fourier coefficients of `term` to component `comp`.
pub fn add_trig_term(f: &mut SpectralField, comp: usize, term: &TrigTerm) -> Result<()> {
    let grid = f.grid();
    if term.max_wavenumber() >= grid.nyquist() {
        return Err(Error::Config(format!(
            "wavenumber {} not representable on n={} grid",
            term.max_wavenumber(),
            grid.n()
        )));
    }
    let mut amp = term.amplitude;
    // Per-axis list of (wavenumber, coefficient).
    let mut factors: Vec<Vec<(i64, Complex64)>> = Vec::with_capacity(3);
    for &(t, k) in &term.modes {
        let (t, k) = if k < 0 {
            if t == Trig::Sin {
                amp = -amp;
            }
            (t, -k)
        } else {
            (t, k)
        };
        let axis = match (t, k) {
            (Trig::Cos, 0) => vec![(0, Complex64::new(1.0, 0.0))],
            (Trig::Sin, 0) => return Ok(()),
            (Trig::Cos, k) => vec![(k, Complex64::new(0.5, 0.0)), (-k, Complex64::new(0.5, 0.0))],
            (Trig::Sin, k) => vec![(k, Complex64::new(0.0, -0.5)), (-k, Complex64::new(0.0, 0.5))],
        };
        factors.push(axis);
    }
    for &(kx, cx) in &factors[0] {
        if kx < 0 {
            continue;
        }
        for &(ky, cy) in &factors[1] {
            for &(kz, cz) in &factors[2] {
                let slot = f
                    .coefficient_mut(comp, [kx, ky, kz])
                    .expect("wavenumbers checked against the grid");
                *slot += cx * cy * cz * amp;
            }
        }
    }
    Ok(())
}
