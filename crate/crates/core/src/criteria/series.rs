use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norms restricted to one ball, sampled at the series times.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BallTrace {
    pub center: [f64; 3],
    pub radius: f64,
    pub hess: Vec<f64>,
    pub vort: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub grid_n: Option<usize>,
    /// Velocity sampling mode of the run that produced the series.
    pub sampling: Option<String>,
    /// `‖ω₀‖_∞` of the initial state.
    pub omega0_sup: Option<f64>,
    /// `‖ω₀·∇u₀‖_∞` of the initial state.
    pub stretch0_sup: Option<f64>,
}

/// Sup-norm traces of a run; columns follow the series CSV.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub t: Vec<f64>,
    pub hess: Vec<f64>,
    pub vort: Vec<f64>,
    pub gradu: Vec<f64>,
    pub mu: Vec<f64>,
    pub energy: Vec<f64>,
    pub balls: Vec<BallTrace>,
    pub meta: SeriesMeta,
}

/// One row of a series.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormSample {
    pub t: f64,
    pub hess: f64,
    pub vort: f64,
    pub gradu: f64,
    pub mu: f64,
    pub energy: f64,
    /// `(hess, vort, u)` per ball, in ball order.
    pub balls: Vec<[f64; 3]>,
}

impl NormSeries {
    pub fn with_balls(balls: &[([f64; 3], f64)], meta: SeriesMeta) -> Self {
        Self {
            balls: balls
                .iter()
                .map(|(center, radius)| BallTrace {
                    center: *center,
                    radius: *radius,
                    ..BallTrace::default()
                })
                .collect(),
            meta,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn push(&mut self, s: &NormSample) -> Result<()> {
        if s.balls.len() != self.balls.len() {
            return Err(Error::Dimension(format!(
                "sample has {} ball entries, series has {} balls",
                s.balls.len(),
                self.balls.len()
            )));
        }
        self.t.push(s.t);
        self.hess.push(s.hess);
        self.vort.push(s.vort);
        self.gradu.push(s.gradu);
        self.mu.push(s.mu);
        self.energy.push(s.energy);
        for (trace, [h, w, u]) in self.balls.iter_mut().zip(&s.balls) {
            trace.hess.push(*h);
            trace.vort.push(*w);
            trace.u.push(*u);
        }
        Ok(())
    }

    /// Strictly increasing times; every norm finite and nonnegative; all
    /// traces of equal length.
    pub fn validate(&self) -> Result<()> {
        let n = self.t.len();
        if self.t.windows(2).any(|w| !(w[1] > w[0])) || self.t.iter().any(|t| !t.is_finite()) {
            return Err(Error::Input("series times must be finite and strictly increasing".into()));
        }
        let mut traces: Vec<(&str, &[f64])> = vec![
            ("hess_sup", &self.hess),
            ("vort_sup", &self.vort),
            ("gradu_sup", &self.gradu),
            ("mu_sup", &self.mu),
            ("energy", &self.energy),
        ];
        for b in &self.balls {
            traces.push(("hess_sup_b", &b.hess));
            traces.push(("vort_sup_b", &b.vort));
            traces.push(("u_sup_b", &b.u));
        }
        for (name, v) in traces {
            if v.len() != n {
                return Err(Error::Dimension(format!("{name} has {} samples, expected {n}", v.len())));
            }
            if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::Input(format!("{name} holds invalid norm value {x}")));
            }
        }
        Ok(())
    }
}
