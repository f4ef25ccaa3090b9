//! Type I synthetic pressure profile `g(τ) = η/(T−τ)²` on `[t₀, T−ε]`.
//!
//! For `η < 1` the nested functional is bounded by a chain of simpler
//! integrals ending at `(T−t₀)/(1−η)`; each line is evaluated separately
//! and the chain is checked in integrated form. For `η ≥ 1` the growth of
//! the functional under halving of `ε` is measured instead.

use serde::{Deserialize, Serialize};

use super::nested::{nested_functional, NestedResult};
use super::quadrature::{certified, cumulative_trapezoid, trapezoid, Estimate};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticOptions {
    /// Number of times the cut is halved after the initial one.
    pub halvings: usize,
    /// Samples per unit of `ln(T−t)`.
    pub nodes_per_efold: usize,
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        Self {
            halvings: 20,
            nodes_per_efold: 1000,
        }
    }
}

/// The bound chain for one cut, in the order it is dominated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLines {
    /// Nested functional with the profile's exact inner integrals.
    pub exact_inner: Estimate,
    /// `∫∫ (T−s)⁻¹ exp(η ∫_s^t (T−σ)⁻¹ dσ) ds dt` with the σ-integral
    /// done numerically.
    pub log_kernel: Estimate,
    /// `∫∫ (T−s)⁻¹ ((T−s)/(T−t))^η ds dt`.
    pub power_kernel: Estimate,
    /// `∫ ((T−t₀)/(T−t))^η dt`.
    pub final_bound: Estimate,
}

impl ChainLines {
    fn as_array(&self) -> [Estimate; 4] {
        [
            self.exact_inner,
            self.log_kernel,
            self.power_kernel,
            self.final_bound,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    pub eps_cut: f64,
    pub samples: usize,
    pub nested: NestedResult,
    pub chain: Option<ChainLines>,
    /// Every line dominates the previous one within certificates.
    pub dominated: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    /// `F(ε/2)/F(ε)` for consecutive cuts.
    pub value_ratios: Vec<f64>,
    /// Ratios of consecutive increments of `F` under halving.
    pub increment_ratios: Vec<f64>,
    /// `p` in `F(ε) ≈ F₀ − C ε^p`, from the last increment ratio.
    pub measured_exponent: f64,
    /// `1 − η`.
    pub expected_exponent: f64,
    /// Last increment divided by `ln 2`: the coefficient of `ln(1/ε)` when
    /// the growth is logarithmic.
    pub log_coefficient: f64,
    pub diverges: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticReport {
    pub eta: f64,
    pub t0: f64,
    pub t_end: f64,
    pub cuts: Vec<CutResult>,
    /// `(T−t₀)/(1−η)` when `η < 1`.
    pub bound_limit: Option<f64>,
    /// `ε → 0` extrapolation of the final bound line.
    pub final_bound_limit: Option<Estimate>,
    /// `ε → 0` extrapolation of the nested functional itself (`η < 1`).
    pub nested_limit: Option<Estimate>,
    pub chain_dominated: Option<bool>,
    pub growth: Growth,
}

/// Exponents at or below this count as non-decaying increments.
const DIVERGENCE_EXPONENT: f64 = 0.02;

/// Samples geometric in `T−t`, from `t₀` to `T−ε`.
pub fn geometric_nodes(t0: f64, t_end: f64, eps: f64, per_efold: usize) -> Vec<f64> {
    let (hi, lo) = ((t_end - t0).ln(), eps.ln());
    let n = ((hi - lo) * per_efold as f64).ceil().max(2.0) as usize + 1;
    let mut t: Vec<f64> = (0..n)
        .map(|i| {
            let y = hi + (lo - hi) * i as f64 / (n - 1) as f64;
            t_end - y.exp()
        })
        .collect();
    t[0] = t0;
    t[n - 1] = t_end - eps;
    t
}

fn nested_exact_inner(t: &[f64], eta: f64, t0: f64, t_end: f64) -> f64 {
    let span = t_end - t0;
    let big_g = |s: f64| eta * (1.0 / (t_end - s) - 1.0 / span);
    // I(t) − I(s) = J(t) − J(s) with J(s) = −η ln(T−s) − η s/(T−t₀).
    let j = |s: f64| -eta * (t_end - s).ln() - eta * (s - t0) / span;
    let weights: Vec<f64> = t.iter().map(|&s| big_g(s) * (-j(s)).exp()).collect();
    let acc = cumulative_trapezoid(t, &weights);
    let outer: Vec<f64> = t.iter().zip(&acc).map(|(&s, a)| j(s).exp() * a).collect();
    trapezoid(t, &outer)
}

fn log_kernel(t: &[f64], eta: f64, t_end: f64) -> f64 {
    let recip: Vec<f64> = t.iter().map(|s| 1.0 / (t_end - s)).collect();
    let k = cumulative_trapezoid(t, &recip);
    let weights: Vec<f64> = recip.iter().zip(&k).map(|(r, k)| r * (-eta * k).exp()).collect();
    let acc = cumulative_trapezoid(t, &weights);
    let outer: Vec<f64> = k.iter().zip(&acc).map(|(k, a)| (eta * k).exp() * a).collect();
    trapezoid(t, &outer)
}

fn power_kernel(t: &[f64], eta: f64, t_end: f64) -> f64 {
    let weights: Vec<f64> = t.iter().map(|s| (t_end - s).powf(eta - 1.0)).collect();
    let acc = cumulative_trapezoid(t, &weights);
    let outer: Vec<f64> = t
        .iter()
        .zip(&acc)
        .map(|(s, a)| (t_end - s).powf(-eta) * a)
        .collect();
    trapezoid(t, &outer)
}

fn final_bound(t: &[f64], eta: f64, t0: f64, t_end: f64) -> f64 {
    let f: Vec<f64> = t
        .iter()
        .map(|s| ((t_end - t0) / (t_end - s)).powf(eta))
        .collect();
    trapezoid(t, &f)
}

/// Relative slack for lines that are equal in exact arithmetic.
const CHAIN_ROUNDOFF: f64 = 1e-12;

fn dominated(nested: &NestedResult, chain: &ChainLines) -> bool {
    let mut lines = vec![nested.combined()];
    lines.extend(chain.as_array());
    lines.windows(2).all(|w| {
        let slack = w[0].error + w[1].error + CHAIN_ROUNDOFF * w[1].value.abs();
        w[0].value <= w[1].value + slack
    })
}

/// Aitken extrapolation of the last three entries, with the change from
/// the previous triple as its error.
fn aitken_limit(v: &[f64]) -> Option<Estimate> {
    let accel = |w: &[f64]| -> f64 {
        let (d1, d2) = (w[1] - w[0], w[2] - w[1]);
        let denom = d2 - d1;
        if denom == 0.0 {
            w[2]
        } else {
            w[2] - d2 * d2 / denom
        }
    };
    let n = v.len();
    if n < 3 {
        return None;
    }
    let value = accel(&v[n - 3..]);
    let error = if n >= 4 {
        (value - accel(&v[n - 4..n - 1])).abs()
    } else {
        (value - v[n - 1]).abs()
    };
    Some(Estimate { value, error })
}

pub fn synthetic_profile(
    eta: f64,
    t0: f64,
    t_end: f64,
    eps_cut: f64,
    options: SyntheticOptions,
) -> Result<SyntheticReport> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Input(format!("eta must be positive, got {eta}")));
    }
    if !(eps_cut > 0.0) || !(t0 < t_end - eps_cut) || !t0.is_finite() || !t_end.is_finite() {
        return Err(Error::Input(format!(
            "need eps_cut > 0 and t0 < T - eps_cut (t0={t0}, T={t_end}, eps_cut={eps_cut})"
        )));
    }
    if options.halvings < 2 || options.nodes_per_efold < 4 {
        return Err(Error::Input(
            "synthetic profile needs at least two halvings and four nodes per e-fold".into(),
        ));
    }
    let with_chain = eta < 1.0;
    let mut cuts = Vec::with_capacity(options.halvings + 1);
    for k in 0..=options.halvings {
        let eps = eps_cut / 2f64.powi(k as i32);
        let t = geometric_nodes(t0, t_end, eps, options.nodes_per_efold);
        let g: Vec<f64> = t.iter().map(|s| eta / ((t_end - s) * (t_end - s))).collect();
        let nested = nested_functional(&t, &g)?;
        let chain = with_chain.then(|| ChainLines {
            exact_inner: certified(&t, &t, |t, _| nested_exact_inner(t, eta, t0, t_end)),
            log_kernel: certified(&t, &t, |t, _| log_kernel(t, eta, t_end)),
            power_kernel: certified(&t, &t, |t, _| power_kernel(t, eta, t_end)),
            final_bound: certified(&t, &t, |t, _| final_bound(t, eta, t0, t_end)),
        });
        let dominated = chain.as_ref().map(|c| dominated(&nested, c));
        cuts.push(CutResult {
            eps_cut: eps,
            samples: t.len(),
            nested,
            chain,
            dominated,
        });
    }

    let values: Vec<f64> = cuts.iter().map(|c| c.nested.reduced.value).collect();
    let value_ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    let increments: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let increment_ratios: Vec<f64> = increments.windows(2).map(|w| w[1] / w[0]).collect();
    let last_ratio = *increment_ratios.last().expect("at least two halvings");
    let measured_exponent = -last_ratio.log2();
    let growth = Growth {
        value_ratios,
        increment_ratios,
        measured_exponent,
        expected_exponent: 1.0 - eta,
        log_coefficient: increments.last().copied().unwrap_or(0.0) / std::f64::consts::LN_2,
        diverges: !(measured_exponent > DIVERGENCE_EXPONENT),
    };

    let (bound_limit, final_bound_limit, nested_limit, chain_dominated) = if with_chain {
        let finals: Vec<f64> = cuts
            .iter()
            .map(|c| c.chain.as_ref().expect("chain present").final_bound.value)
            .collect();
        (
            Some((t_end - t0) / (1.0 - eta)),
            aitken_limit(&finals),
            aitken_limit(&values),
            Some(cuts.iter().all(|c| c.dominated == Some(true))),
        )
    } else {
        (None, None, None, None)
    };

    Ok(SyntheticReport {
        eta,
        t0,
        t_end,
        cuts,
        bound_limit,
        final_bound_limit,
        nested_limit,
        chain_dominated,
        growth,
    })
}

/// The `η = 0` limit: zero pressure, so every functional vanishes and the
/// final bound is the window length.
pub fn zero_profile(
    t0: f64,
    t_end: f64,
    eps_cut: f64,
    options: SyntheticOptions,
) -> Result<SyntheticReport> {
    if !(eps_cut > 0.0) || !(t0 < t_end - eps_cut) {
        return Err(Error::Input(format!(
            "need eps_cut > 0 and t0 < T - eps_cut (t0={t0}, T={t_end}, eps_cut={eps_cut})"
        )));
    }
    let mut cuts = Vec::with_capacity(options.halvings + 1);
    for k in 0..=options.halvings {
        let eps = eps_cut / 2f64.powi(k as i32);
        let t = geometric_nodes(t0, t_end, eps, options.nodes_per_efold);
        let nested = nested_functional(&t, &vec![0.0; t.len()])?;
        cuts.push(CutResult {
            eps_cut: eps,
            samples: t.len(),
            nested,
            chain: None,
            dominated: None,
        });
    }
    Ok(SyntheticReport {
        eta: 0.0,
        t0,
        t_end,
        cuts,
        bound_limit: Some(t_end - t0),
        final_bound_limit: Some(Estimate::exact(t_end - t0)),
        nested_limit: Some(Estimate::exact(0.0)),
        chain_dominated: None,
        growth: Growth {
            value_ratios: Vec::new(),
            increment_ratios: Vec::new(),
            measured_exponent: 1.0,
            expected_exponent: 1.0,
            log_coefficient: 0.0,
            diverges: false,
        },
    })
}
