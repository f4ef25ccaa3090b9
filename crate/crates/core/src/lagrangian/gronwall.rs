use super::particles::{mat_vec, norm, ParticleSet};
use crate::criteria::{growth_minus_one, subsample};
use crate::error::{Error, Result};

/// Margins `RHS − |ω(X,t)|` of the pointwise bound along one trajectory
/// and their quadrature certificates, at every trace sample.
///
/// `RHS(t) = (|ω₀| + |ω₀·∇u₀|(t − t₀)) · exp(∫_{t₀}^t ∫_{t₀}^s g)`, the
/// closed form of the bracket `1 + ∫ G e^{∫G}`.
pub fn gronwall_margins(
    t: &[f64],
    hess: &[f64],
    vort: &[f64],
    omega0_abs: f64,
    stretch0_abs: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = t.len();
    if n == 0 || hess.len() != n || vort.len() != n {
        return Err(Error::Input("trajectory traces must be non-empty and aligned".into()));
    }
    let prefactor: Vec<f64> = t.iter().map(|s| omega0_abs + stretch0_abs * (s - t[0])).collect();
    let growth = if n > 1 { growth_minus_one(t, hess) } else { vec![0.0] };
    let rhs: Vec<f64> = prefactor.iter().zip(&growth).map(|(p, g)| p * (1.0 + g)).collect();
    let margins = rhs.iter().zip(vort).map(|(r, w)| r - w).collect();

    let mut tol: Vec<f64> = rhs.iter().map(|r| 1e-12 * r.abs()).collect();
    if n >= 3 {
        let idx: Vec<usize> = subsample(&(0..n).collect::<Vec<_>>());
        let coarse = growth_minus_one(&subsample(t), &subsample(hess));
        let mut err = vec![f64::NAN; n];
        for (k, &i) in idx.iter().enumerate() {
            err[i] = prefactor[i] * (growth[i] - coarse[k]).abs();
        }
        for i in 0..n {
            if err[i].is_nan() {
                // Between two coarse samples; take the larger neighbour.
                err[i] = err[i - 1].max(err[i + 1]);
            }
        }
        for (t, e) in tol.iter_mut().zip(&err) {
            *t += e;
        }
    }
    Ok((margins, tol))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GronwallCheck {
    pub t: Vec<f64>,
    /// `margins[particle][time]`.
    pub margins: Vec<Vec<f64>>,
    pub tolerance: Vec<Vec<f64>>,
    pub min_margin: f64,
    /// Smallest `margin + tolerance`; negative means a violation.
    pub min_slack: f64,
    pub worst_particle: usize,
    pub worst_time: f64,
    pub violations: usize,
}

/// Round-off allowed in a sampled `|ω|`, relative to the largest vorticity
/// in the flow.
pub const SAMPLING_ROUNDOFF: f64 = 1e-12;

/// Pointwise vorticity bound for every particle over its recorded traces.
pub fn gronwall_bound_check(ps: &ParticleSet) -> Result<GronwallCheck> {
    let t = ps.trace_times().to_vec();
    let roundoff: Vec<f64> = (0..t.len())
        .map(|j| {
            let now = (0..ps.len()).map(|p| ps.vort_trace(p)[j]).fold(0.0, f64::max);
            SAMPLING_ROUNDOFF * now.max(ps.omega_scale())
        })
        .collect();
    let mut out = GronwallCheck {
        t: t.clone(),
        margins: Vec::with_capacity(ps.len()),
        tolerance: Vec::with_capacity(ps.len()),
        min_margin: f64::INFINITY,
        min_slack: f64::INFINITY,
        worst_particle: 0,
        worst_time: t.first().copied().unwrap_or(0.0),
        violations: 0,
    };
    for p in 0..ps.len() {
        let w0 = ps.omega0()[p];
        let stretch = norm(mat_vec(&ps.gradu0()[p], w0));
        let (m, mut tol) = gronwall_margins(&t, ps.hess_trace(p), ps.vort_trace(p), norm(w0), stretch)?;
        tol.iter_mut().zip(&roundoff).for_each(|(t, r)| *t += r);
        for (j, (mj, tj)) in m.iter().zip(&tol).enumerate() {
            out.min_margin = out.min_margin.min(*mj);
            if mj + tj < out.min_slack {
                out.min_slack = mj + tj;
                out.worst_particle = p;
                out.worst_time = t[j];
            }
            if mj + tj < 0.0 {
                out.violations += 1;
            }
        }
        out.margins.push(m);
        out.tolerance.push(tol);
    }
    Ok(out)
}
