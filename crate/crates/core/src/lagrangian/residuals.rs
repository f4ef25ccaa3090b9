//! Discrete checks of the Lagrangian identities along recorded
//! trajectories.

use super::particles::{mat_vec, norm, HistorySample, ParticleSet};
use crate::error::{Error, Result};

/// Relative floor for the Cauchy residual denominator, as a fraction of
/// the largest `|ω₀|` over the grid (or the set, if larger).
pub const CAUCHY_FLOOR: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyReport {
    pub t: f64,
    pub floor: f64,
    /// `ω(X,t) − A ω₀` per particle.
    pub difference: Vec<[f64; 3]>,
    /// `|ω(X,t) − A ω₀| / max(|ω₀|, floor)` per particle.
    pub relative: Vec<f64>,
    pub max: f64,
    pub mean: f64,
}

pub fn cauchy_residual_at(ps: &ParticleSet, sample: &HistorySample) -> CauchyReport {
    let w0max = ps
        .omega0()
        .iter()
        .map(|w| norm(*w))
        .fold(ps.omega_scale(), f64::max);
    let floor = (CAUCHY_FLOOR * w0max).max(f64::MIN_POSITIVE);
    let mut difference = Vec::with_capacity(ps.len());
    let mut relative = Vec::with_capacity(ps.len());
    for ((a, w), w0) in sample.a.iter().zip(&sample.omega).zip(ps.omega0()) {
        let pushed = mat_vec(a, *w0);
        let d = [w[0] - pushed[0], w[1] - pushed[1], w[2] - pushed[2]];
        relative.push(norm(d) / norm(*w0).max(floor));
        difference.push(d);
    }
    let max = relative.iter().copied().fold(0.0, f64::max);
    let mean = relative.iter().sum::<f64>() / relative.len() as f64;
    CauchyReport {
        t: sample.t,
        floor,
        difference,
        relative,
        max,
        mean,
    }
}

/// Cauchy residual at the current particle time; the latest record must
/// be at that time.
pub fn cauchy_residual(ps: &ParticleSet) -> Result<CauchyReport> {
    match ps.latest() {
        Some(s) if s.t == ps.t() => Ok(cauchy_residual_at(ps, s)),
        _ => Err(Error::NotReady(format!(
            "no record at the current particle time t={}",
            ps.t()
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualKind {
    /// `∂²ω/∂t² + (D²p)ω` along trajectories.
    SecondDerivative,
    /// `∂²X/∂t² + ∇p` along trajectories.
    Acceleration,
}

impl ResidualKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ResidualKind::SecondDerivative => "second_derivative",
            ResidualKind::Acceleration => "acceleration",
        }
    }
}

/// Residuals at interior history samples for one stencil stride.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSeries {
    pub kind: ResidualKind,
    pub stride: usize,
    /// Indices into the history of the stencil midpoints.
    pub index: Vec<usize>,
    pub t: Vec<f64>,
    /// `residual[time][particle]`.
    pub residual: Vec<Vec<[f64; 3]>>,
    /// Largest residual norm over particles at each midpoint.
    pub max_norm: Vec<f64>,
}

/// Three-point second derivative on possibly uneven spacing.
fn second_difference(t: [f64; 3], f: [[f64; 3]; 3]) -> [f64; 3] {
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    let scale = 2.0 / (h1 * h2 * (h1 + h2));
    [0, 1, 2].map(|i| scale * (h1 * (f[2][i] - f[1][i]) - h2 * (f[1][i] - f[0][i])))
}

fn check_stride(history_len: usize, stride: usize) -> Result<()> {
    if stride == 0 {
        return Err(Error::Config("stencil stride must be positive".into()));
    }
    if history_len < 2 * stride + 1 {
        return Err(Error::NotReady(format!(
            "history holds {history_len} samples; stride {stride} needs at least {}",
            2 * stride + 1
        )));
    }
    Ok(())
}

pub fn residual_series(ps: &ParticleSet, kind: ResidualKind, stride: usize) -> Result<ResidualSeries> {
    let h = ps.history();
    check_stride(h.len(), stride)?;
    let mut out = ResidualSeries {
        kind,
        stride,
        index: Vec::new(),
        t: Vec::new(),
        residual: Vec::new(),
        max_norm: Vec::new(),
    };
    for mid in stride..h.len() - stride {
        let (lo, c, hi) = (&h[mid - stride], &h[mid], &h[mid + stride]);
        let times = [lo.t, c.t, hi.t];
        let row: Vec<[f64; 3]> = (0..ps.len())
            .map(|p| match kind {
                ResidualKind::SecondDerivative => {
                    let dd = second_difference(times, [lo.omega[p], c.omega[p], hi.omega[p]]);
                    let hw = mat_vec(&c.hess_p[p], c.omega[p]);
                    [dd[0] + hw[0], dd[1] + hw[1], dd[2] + hw[2]]
                }
                ResidualKind::Acceleration => {
                    let dd = second_difference(times, [lo.x[p], c.x[p], hi.x[p]]);
                    let g = c.grad_p[p];
                    [dd[0] + g[0], dd[1] + g[1], dd[2] + g[2]]
                }
            })
            .collect();
        out.index.push(mid);
        out.t.push(c.t);
        out.max_norm.push(row.iter().map(|r| norm(*r)).fold(0.0, f64::max));
        out.residual.push(row);
    }
    Ok(out)
}

pub fn second_derivative_residual(ps: &ParticleSet, stride: usize) -> Result<ResidualSeries> {
    residual_series(ps, ResidualKind::SecondDerivative, stride)
}

pub fn acceleration_residual(ps: &ParticleSet, stride: usize) -> Result<ResidualSeries> {
    residual_series(ps, ResidualKind::Acceleration, stride)
}

/// Residuals at stride 1 and 2 on their common midpoints, with the
/// observed order `log2(coarse/fine)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderCheck {
    pub kind: ResidualKind,
    pub t: Vec<f64>,
    pub fine: ResidualSeries,
    pub coarse: ResidualSeries,
    /// Per common midpoint, from the largest residual norms.
    pub order: Vec<Option<f64>>,
    /// From the largest residual norms over all common midpoints.
    pub overall: Option<f64>,
}

fn log_ratio(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).log2())
}

pub fn residual_order(ps: &ParticleSet, kind: ResidualKind) -> Result<OrderCheck> {
    let coarse_all = residual_series(ps, kind, 2)?;
    let fine_all = residual_series(ps, kind, 1)?;
    let keep = |s: &ResidualSeries| -> ResidualSeries {
        let sel: Vec<usize> = (0..s.index.len())
            .filter(|&k| coarse_all.index.contains(&s.index[k]))
            .collect();
        ResidualSeries {
            kind,
            stride: s.stride,
            index: sel.iter().map(|&k| s.index[k]).collect(),
            t: sel.iter().map(|&k| s.t[k]).collect(),
            residual: sel.iter().map(|&k| s.residual[k].clone()).collect(),
            max_norm: sel.iter().map(|&k| s.max_norm[k]).collect(),
        }
    };
    let fine = keep(&fine_all);
    let coarse = coarse_all;
    let order = fine
        .max_norm
        .iter()
        .zip(&coarse.max_norm)
        .map(|(f, c)| log_ratio(*c, *f))
        .collect();
    let fmax = fine.max_norm.iter().copied().fold(0.0, f64::max);
    let cmax = coarse.max_norm.iter().copied().fold(0.0, f64::max);
    Ok(OrderCheck {
        kind,
        t: fine.t.clone(),
        order,
        overall: log_ratio(cmax, fmax),
        fine,
        coarse,
    })
}
