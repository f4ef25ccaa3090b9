use serde::{Deserialize, Serialize};

use super::nested::{nested_functional, NestedResult};
use super::quadrature::{certified, check_trace, cumulative_trapezoid, trapezoid, window, Estimate};
use super::series::NormSeries;
use crate::error::{Error, Result};

/// Default share of the window used for the limsup proxy.
pub const TAIL_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeOne {
    /// `max (T_ref − t)² g(t)` over all samples.
    pub sup: f64,
    /// The same maximum over the final `tail_fraction` of the window.
    pub tail_sup: f64,
    pub tail_fraction: f64,
    pub t_ref: f64,
}

pub fn type_one_sup(t: &[f64], g: &[f64], t_ref: f64, tail_fraction: f64) -> TypeOne {
    let (a, b) = (t[0], t[t.len() - 1]);
    let tail_start = b - tail_fraction * (b - a);
    let weighted = |s: f64, v: f64| (t_ref - s) * (t_ref - s) * v;
    let mut sup = 0.0f64;
    let mut tail_sup = 0.0f64;
    for (&s, &v) in t.iter().zip(g) {
        let w = weighted(s, v);
        sup = sup.max(w);
        if s >= tail_start {
            tail_sup = tail_sup.max(w);
        }
    }
    TypeOne {
        sup,
        tail_sup,
        tail_fraction,
        t_ref,
    }
}

fn exp_of_cumulative(t: &[f64], h: &[f64]) -> f64 {
    let e: Vec<f64> = cumulative_trapezoid(t, h).into_iter().map(f64::exp).collect();
    trapezoid(t, &e)
}

/// `∫_a^b exp(∫_a^t h) dt`.
pub fn exp_criterion(t: &[f64], h: &[f64]) -> Result<Estimate> {
    check_trace(t, h, true)?;
    Ok(certified(t, h, exp_of_cumulative))
}

/// `∫_a^b ‖ω‖ dt`.
pub fn bkm_integral(t: &[f64], w: &[f64]) -> Result<Estimate> {
    check_trace(t, w, true)?;
    Ok(certified(t, w, trapezoid))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Keyforma {
    /// `∫ ‖ω‖ dt` over the window.
    pub lhs: Estimate,
    /// `(‖ω₀‖ + ‖ω₀·∇u₀‖ L)(L + F)` with `L` the window length.
    pub rhs: Estimate,
    pub margin: f64,
    /// Combined certificate of both sides.
    pub tolerance: f64,
    pub holds: bool,
    pub bracket: NestedResult,
    pub omega0_sup: f64,
    pub stretch0_sup: f64,
}

/// Integrated vorticity inequality over the span of the traces.
pub fn keyforma_check(
    t: &[f64],
    vort: &[f64],
    hess: &[f64],
    omega0_sup: f64,
    stretch0_sup: f64,
) -> Result<Keyforma> {
    if vort.is_empty() || hess.is_empty() {
        return Err(Error::Input("vorticity and pressure Hessian traces are required".into()));
    }
    if !(omega0_sup >= 0.0 && stretch0_sup >= 0.0) {
        return Err(Error::Input("initial norms must be nonnegative".into()));
    }
    let lhs = bkm_integral(t, vort)?;
    let bracket = nested_functional(t, hess)?;
    let f = bracket.combined();
    let len = t[t.len() - 1] - t[0];
    let prefactor = omega0_sup + stretch0_sup * len;
    let rhs = Estimate {
        value: prefactor * (len + f.value),
        error: prefactor * f.error,
    };
    let margin = rhs.value - lhs.value;
    let tolerance = lhs.error + rhs.error + 1e-12 * rhs.value.abs().max(lhs.value.abs());
    Ok(Keyforma {
        lhs,
        rhs,
        margin,
        tolerance,
        holds: margin >= -tolerance,
        bracket,
        omega0_sup,
        stretch0_sup,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    /// Defaults to the full series span.
    pub window: Option<(f64, f64)>,
    /// Defaults to the window end.
    pub t_ref: Option<f64>,
    pub tail_fraction: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            window: None,
            t_ref: None,
            tail_fraction: TAIL_FRACTION,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub region: String,
    pub ball_center: Option<[f64; 3]>,
    pub ball_radius: Option<f64>,
    pub window: [f64; 2],
    pub samples: usize,
    pub t_ref: f64,
    pub tail_fraction: f64,
    pub grid_n: Option<usize>,
    pub sampling: Option<String>,
    /// Where the initial norms of the integrated inequality came from.
    pub initial_norms: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub provenance: Provenance,
    pub f_nested: NestedResult,
    pub type_one: TypeOne,
    pub bkm: Estimate,
    pub exp_mu: Option<Estimate>,
    pub exp_hess: Estimate,
    pub u_ball_integral: Option<Estimate>,
    pub keyforma: Option<Keyforma>,
    /// Theorem-backed checks that failed beyond their certificates.
    pub violations: Vec<String>,
}

struct Resolved {
    a: f64,
    b: f64,
    t_ref: f64,
}

fn resolve(series: &NormSeries, opts: &ReportOptions) -> Result<Resolved> {
    series.validate()?;
    if series.len() < 2 {
        return Err(Error::Input("series needs at least two samples".into()));
    }
    let (a, b) = opts
        .window
        .unwrap_or((series.t[0], series.t[series.len() - 1]));
    let t_ref = opts.t_ref.unwrap_or(b);
    if t_ref < b {
        return Err(Error::Input(format!("t_ref {t_ref} precedes the window end {b}")));
    }
    if !(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0) {
        return Err(Error::Input("tail fraction must lie in (0, 1]".into()));
    }
    Ok(Resolved { a, b, t_ref })
}

fn restrict(series: &NormSeries, v: &[f64], r: &Resolved) -> Result<(Vec<f64>, Vec<f64>)> {
    window(&series.t, v, r.a, r.b)
}

fn dual_path_violation(nested: &NestedResult, violations: &mut Vec<String>) {
    if !nested.agree {
        violations.push(format!(
            "nested functional paths disagree: direct {} vs reduced {}",
            nested.direct.value, nested.reduced.value
        ));
    }
}

/// Whole-box criterion report.
pub fn global_report(series: &NormSeries, opts: &ReportOptions) -> Result<CriterionReport> {
    let r = resolve(series, opts)?;
    let (t, hess) = restrict(series, &series.hess, &r)?;
    let (_, vort) = restrict(series, &series.vort, &r)?;
    let (_, mu) = restrict(series, &series.mu, &r)?;
    let (_, gradu) = restrict(series, &series.gradu, &r)?;

    let f_nested = nested_functional(&t, &hess)?;
    let mut violations = Vec::new();
    dual_path_violation(&f_nested, &mut violations);

    let from_meta = r.a == series.t[0]
        && series.meta.omega0_sup.is_some()
        && series.meta.stretch0_sup.is_some();
    let (omega0, stretch0, source) = if from_meta {
        (
            series.meta.omega0_sup.expect("checked"),
            series.meta.stretch0_sup.expect("checked"),
            "initial state",
        )
    } else {
        (vort[0], vort[0] * gradu[0], "window start, |w||grad u| bound")
    };
    let keyforma = keyforma_check(&t, &vort, &hess, omega0, stretch0)?;
    if !keyforma.holds {
        violations.push(format!(
            "integrated vorticity inequality fails: margin {} below -{}",
            keyforma.margin, keyforma.tolerance
        ));
    }

    Ok(CriterionReport {
        provenance: Provenance {
            region: "global".into(),
            ball_center: None,
            ball_radius: None,
            window: [r.a, r.b],
            samples: t.len(),
            t_ref: r.t_ref,
            tail_fraction: opts.tail_fraction,
            grid_n: series.meta.grid_n,
            sampling: series.meta.sampling.clone(),
            initial_norms: Some(source.into()),
        },
        type_one: type_one_sup(&t, &hess, r.t_ref, opts.tail_fraction),
        bkm: bkm_integral(&t, &vort)?,
        exp_mu: Some(exp_criterion(&t, &mu)?),
        exp_hess: exp_criterion(&t, &hess)?,
        u_ball_integral: None,
        keyforma: Some(keyforma),
        f_nested,
        violations,
    })
}

/// Criterion report from the norms restricted to ball `ball`.
pub fn local_report(series: &NormSeries, ball: usize, opts: &ReportOptions) -> Result<CriterionReport> {
    let r = resolve(series, opts)?;
    let trace = series.balls.get(ball).ok_or_else(|| {
        Error::Input(format!(
            "ball {ball} requested but the series has {} balls",
            series.balls.len()
        ))
    })?;
    let (t, hess) = restrict(series, &trace.hess, &r)?;
    let (_, vort) = restrict(series, &trace.vort, &r)?;
    let (_, u) = restrict(series, &trace.u, &r)?;

    let f_nested = nested_functional(&t, &hess)?;
    let mut violations = Vec::new();
    dual_path_violation(&f_nested, &mut violations);

    Ok(CriterionReport {
        provenance: Provenance {
            region: format!("ball {ball}"),
            ball_center: Some(trace.center),
            ball_radius: Some(trace.radius),
            window: [r.a, r.b],
            samples: t.len(),
            t_ref: r.t_ref,
            tail_fraction: opts.tail_fraction,
            grid_n: series.meta.grid_n,
            sampling: series.meta.sampling.clone(),
            initial_norms: None,
        },
        type_one: type_one_sup(&t, &hess, r.t_ref, opts.tail_fraction),
        bkm: bkm_integral(&t, &vort)?,
        exp_mu: None,
        exp_hess: exp_criterion(&t, &hess)?,
        u_ball_integral: Some(certified(&t, &u, trapezoid)),
        keyforma: None,
        f_nested,
        violations,
    })
}
