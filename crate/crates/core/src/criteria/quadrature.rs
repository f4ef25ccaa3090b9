//! Trapezoid rules on (possibly nonuniform) samples, with error
//! certificates from halving the sample density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A quadrature value with its refinement-based error certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

pub fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    debug_assert_eq!(t.len(), f.len());
    t.windows(2)
        .zip(f.windows(2))
        .map(|(tw, fw)| 0.5 * (tw[1] - tw[0]) * (fw[0] + fw[1]))
        .sum()
}

/// Running trapezoid integral; the first entry is zero.
pub fn cumulative_trapezoid(t: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    out.push(0.0);
    for (tw, fw) in t.windows(2).zip(f.windows(2)) {
        acc += 0.5 * (tw[1] - tw[0]) * (fw[0] + fw[1]);
        out.push(acc);
    }
    out
}

/// Every other sample, always keeping the last one.
pub fn subsample<T: Copy>(v: &[T]) -> Vec<T> {
    let mut out: Vec<T> = v.iter().step_by(2).copied().collect();
    if v.len().is_multiple_of(2) {
        if let Some(last) = v.last() {
            out.push(*last);
        }
    }
    out
}

/// Apply `rule` on the full and the half-density samples. The certificate
/// is the full difference `|Q_h − Q_2h|`, three times the asymptotic
/// trapezoid error estimate.
pub fn certified<F>(t: &[f64], f: &[f64], rule: F) -> Estimate
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    let value = rule(t, f);
    if t.len() < 3 {
        return Estimate {
            value,
            error: value.abs(),
        };
    }
    let coarse = rule(&subsample(t), &subsample(f));
    Estimate {
        value,
        error: (value - coarse).abs(),
    }
}

/// Observed convergence order from the full, half and quarter density
/// samples, `log2(|Q_4h − Q_2h| / |Q_2h − Q_h|)`.
pub fn observed_order<F>(t: &[f64], f: &[f64], rule: F) -> Option<f64>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    let (t2, f2) = (subsample(t), subsample(f));
    let (t4, f4) = (subsample(&t2), subsample(&f2));
    if t4.len() < 2 || t4.len() == t2.len() {
        return None;
    }
    let (q1, q2, q4) = (rule(t, f), rule(&t2, &f2), rule(&t4, &f4));
    let (fine, coarse) = ((q2 - q1).abs(), (q4 - q2).abs());
    if fine == 0.0 || coarse == 0.0 {
        return None;
    }
    Some((coarse / fine).log2())
}

/// Checks shared by every trace consumer.
pub fn check_trace(t: &[f64], f: &[f64], nonnegative: bool) -> Result<()> {
    if t.len() != f.len() {
        return Err(Error::Input(format!(
            "trace has {} times but {} values",
            t.len(),
            f.len()
        )));
    }
    if t.len() < 2 {
        return Err(Error::Input("trace needs at least two samples".into()));
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("sample times must be strictly increasing".into()));
    }
    if let Some(v) = f.iter().find(|v| !v.is_finite()) {
        return Err(Error::Input(format!("non-finite trace value {v}")));
    }
    if nonnegative {
        if let Some(v) = f.iter().find(|v| **v < 0.0) {
            return Err(Error::Input(format!("negative trace value {v}")));
        }
    }
    Ok(())
}

/// Restrict a trace to `[a, b]`, inserting linearly interpolated endpoint
/// samples where the window does not fall on sample times.
pub fn window(t: &[f64], f: &[f64], a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (t0, t1) = (t[0], t[t.len() - 1]);
    let slack = 1e-12 * (t1 - t0).abs().max(1.0);
    if !(a < b) || a < t0 - slack || b > t1 + slack {
        return Err(Error::Input(format!(
            "window [{a}, {b}] is not inside the series span [{t0}, {t1}]"
        )));
    }
    let a = a.max(t0);
    let b = b.min(t1);
    let interp = |x: f64| -> f64 {
        let i = t.partition_point(|&s| s <= x).clamp(1, t.len() - 1);
        let (ta, tb) = (t[i - 1], t[i]);
        let w = (x - ta) / (tb - ta);
        f[i - 1] * (1.0 - w) + f[i] * w
    };
    let mut tw = vec![a];
    let mut fw = vec![interp(a)];
    for (s, v) in t.iter().zip(f) {
        if *s > a && *s < b {
            tw.push(*s);
            fw.push(*v);
        }
    }
    tw.push(b);
    fw.push(interp(b));
    // Snap exact sample hits so windowing on sample times is lossless.
    if let Ok(i) = t.binary_search_by(|s| s.total_cmp(&a)) {
        fw[0] = f[i];
    }
    if let Ok(i) = t.binary_search_by(|s| s.total_cmp(&b)) {
        *fw.last_mut().expect("non-empty") = f[i];
    }
    Ok((tw, fw))
}
