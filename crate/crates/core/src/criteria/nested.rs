//! The nested pressure-Hessian functional
//!
//! `F = ∫_a^b ∫_a^t G(s) exp(∫_s^t G(σ) dσ) ds dt`, with `G(s) = ∫_a^s g`,
//!
//! evaluated by direct nested quadrature and by the reduced form
//! `F = ∫_a^b (e^{I(t)} − 1) dt`, `I(t) = ∫_a^t G`. The two agree because
//! `G(s) e^{I(t)−I(s)} = −∂_s e^{I(t)−I(s)}`.

use serde::{Deserialize, Serialize};

use super::quadrature::{certified, check_trace, cumulative_trapezoid, trapezoid, Estimate};
use crate::error::Result;

/// Both evaluations of the nested functional and whether they agree
/// within their combined certificates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedResult {
    pub direct: Estimate,
    pub reduced: Estimate,
    pub agree: bool,
}

impl NestedResult {
    /// Best value with an error covering both routes.
    pub fn combined(&self) -> Estimate {
        let spread = (self.direct.value - self.reduced.value).abs();
        Estimate {
            value: self.reduced.value,
            error: self.reduced.error.max(self.direct.error).max(spread),
        }
    }
}

/// Inner integrals `H(t_j) = ∫_a^{t_j} G(s) e^{I_j − I(s)} ds` by the
/// trapezoid rule in `s`, accumulated with a stable recurrence.
pub fn nested_inner_direct(t: &[f64], g: &[f64]) -> Vec<f64> {
    let big_g = cumulative_trapezoid(t, g);
    let big_i = cumulative_trapezoid(t, &big_g);
    let mut h = Vec::with_capacity(t.len());
    h.push(0.0);
    for j in 1..t.len() {
        let decay = (big_i[j] - big_i[j - 1]).exp();
        let dt = t[j] - t[j - 1];
        let prev = h[j - 1];
        h.push(decay * prev + 0.5 * dt * (big_g[j - 1] * decay + big_g[j]));
    }
    h
}

pub fn nested_direct(t: &[f64], g: &[f64]) -> f64 {
    trapezoid(t, &nested_inner_direct(t, g))
}

/// `e^{I(t_j)} − 1` at every sample.
pub fn growth_minus_one(t: &[f64], g: &[f64]) -> Vec<f64> {
    let big_g = cumulative_trapezoid(t, g);
    cumulative_trapezoid(t, &big_g).into_iter().map(f64::exp_m1).collect()
}

pub fn nested_reduced(t: &[f64], g: &[f64]) -> f64 {
    trapezoid(t, &growth_minus_one(t, g))
}

/// Relative round-off allowance added to the combined certificate.
const ROUNDOFF: f64 = 1e-12;

/// Evaluate the nested functional of a nonnegative trace on its full span.
pub fn nested_functional(t: &[f64], g: &[f64]) -> Result<NestedResult> {
    check_trace(t, g, true)?;
    let direct = certified(t, g, nested_direct);
    let reduced = certified(t, g, nested_reduced);
    let scale = direct.value.abs().max(reduced.value.abs());
    let agree = (direct.value - reduced.value).abs()
        <= direct.error + reduced.error + ROUNDOFF * scale;
    Ok(NestedResult {
        direct,
        reduced,
        agree,
    })
}
