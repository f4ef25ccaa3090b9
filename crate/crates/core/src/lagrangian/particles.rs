use std::collections::VecDeque;
use std::f64::consts::PI;

use super::sampler::{Mat3, PressureSampler, Sampling, VelocitySampler};
use crate::error::{Error, Result};
use crate::pressure::{sym_operator_norm, PressurePack};
use crate::solver::{velocity_max, GridVelocity, StageFields};
use crate::spectral::{curl, inverse, SpectralField};

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn mat_vec(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn axpy3(x: [f64; 3], s: f64, d: [f64; 3]) -> [f64; 3] {
    [x[0] + s * d[0], x[1] + s * d[1], x[2] + s * d[2]]
}

fn axpy_mat(a: &Mat3, s: f64, d: &Mat3) -> Mat3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] += s * d[i][j];
        }
    }
    out
}

/// Flow state at one instant, as needed to sample particles.
#[derive(Clone, Copy)]
pub struct Snapshot<'a> {
    pub t: f64,
    pub u_hat: &'a SpectralField,
    /// Grid velocity for trilinear sampling, if already computed.
    pub grid: Option<&'a GridVelocity>,
    pub pressure: &'a PressurePack,
}

/// All particles at one recorded time.
#[derive(Clone, Debug, PartialEq)]
pub struct HistorySample {
    pub t: f64,
    /// Unwrapped positions, continuous in time.
    pub x: Vec<[f64; 3]>,
    pub a: Vec<Mat3>,
    pub omega: Vec<[f64; 3]>,
    pub grad_p: Vec<[f64; 3]>,
    pub hess_p: Vec<Mat3>,
}

/// Lagrangian markers with deformation gradients and sampled history.
#[derive(Clone, Debug)]
pub struct ParticleSet {
    sampling: Sampling,
    labels: Vec<[f64; 3]>,
    x: Vec<[f64; 3]>,
    a: Vec<Mat3>,
    omega0: Vec<[f64; 3]>,
    gradu0: Vec<Mat3>,
    t_start: f64,
    omega_scale: f64,
    t: f64,
    history: VecDeque<HistorySample>,
    history_cap: usize,
    trace_t: Vec<f64>,
    trace_hess: Vec<Vec<f64>>,
    trace_vort: Vec<Vec<f64>>,
}

impl ParticleSet {
    /// Seed particles at `labels` and record the state at `snap.t`.
    /// `history_cap` bounds the history ring buffer (0 means unbounded).
    pub fn new(
        labels: Vec<[f64; 3]>,
        sampling: Sampling,
        snap: &Snapshot<'_>,
        history_cap: usize,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Config("particle set needs at least one label".into()));
        }
        if history_cap == 1 || history_cap == 2 {
            return Err(Error::Config("particle history must hold at least three samples".into()));
        }
        let labels: Vec<[f64; 3]> = labels
            .into_iter()
            .map(|l| l.map(|c| c.rem_euclid(2.0 * PI)))
            .collect();
        let vel = VelocitySampler::new(sampling, snap.u_hat, snap.grid)?;
        let jets: Vec<_> = labels.iter().map(|&l| vel.jet(l)).collect();
        let np = labels.len();
        let omega_scale = velocity_max(&inverse(&curl(snap.u_hat)));
        let mut set = Self {
            sampling,
            x: labels.clone(),
            a: vec![IDENTITY; np],
            omega0: jets.iter().map(|j| j.vorticity()).collect(),
            gradu0: jets.iter().map(|j| j.grad).collect(),
            labels,
            t_start: snap.t,
            omega_scale,
            t: snap.t,
            history: VecDeque::new(),
            history_cap,
            trace_t: Vec::new(),
            trace_hess: vec![Vec::new(); np],
            trace_vort: vec![Vec::new(); np],
        };
        set.record(snap)?;
        Ok(set)
    }

    /// Fresh particles at the original labels, starting from `snap`.
    pub fn restart(&self, snap: &Snapshot<'_>) -> Result<Self> {
        Self::new(self.labels.clone(), self.sampling, snap, self.history_cap)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sampling(&self) -> Sampling {
        self.sampling
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `max|ω|` over the grid at the seed time.
    pub fn omega_scale(&self) -> f64 {
        self.omega_scale
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn labels(&self) -> &[[f64; 3]] {
        &self.labels
    }

    /// Positions wrapped into `[0, 2π)³`.
    pub fn positions(&self) -> Vec<[f64; 3]> {
        self.x.iter().map(|p| p.map(|c| c.rem_euclid(2.0 * PI))).collect()
    }

    pub fn unwrapped_positions(&self) -> &[[f64; 3]] {
        &self.x
    }

    pub fn deformation(&self) -> &[Mat3] {
        &self.a
    }

    pub fn omega0(&self) -> &[[f64; 3]] {
        &self.omega0
    }

    pub fn gradu0(&self) -> &[Mat3] {
        &self.gradu0
    }

    pub fn history(&self) -> &VecDeque<HistorySample> {
        &self.history
    }

    pub fn latest(&self) -> Option<&HistorySample> {
        self.history.back()
    }

    /// Recorded times of the per-particle norm traces (never truncated).
    pub fn trace_times(&self) -> &[f64] {
        &self.trace_t
    }

    /// `|D²p(X(α,t),t)|` (operator norm) at every recorded time.
    pub fn hess_trace(&self, p: usize) -> &[f64] {
        &self.trace_hess[p]
    }

    /// `|ω(X(α,t),t)|` at every recorded time.
    pub fn vort_trace(&self, p: usize) -> &[f64] {
        &self.trace_vort[p]
    }

    /// Largest `|det A − 1|` over particles.
    pub fn det_drift(&self) -> f64 {
        self.a.iter().map(|m| (det(m) - 1.0).abs()).fold(0.0, f64::max)
    }

    /// One RK4 step of `dX/dt = u(X,t)` and `dA/dt = ∇u(X,t)·A` using the
    /// solver's stage velocities.
    pub fn advance(&mut self, stages: &StageFields, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        if self.sampling == Sampling::Trilinear && stages.grid.is_none() {
            return Err(Error::Config(
                "trilinear particles need grid stage fields from the solver".into(),
            ));
        }
        let samplers = (0..4)
            .map(|s| {
                let grid = stages.grid.as_ref().map(|g| &g[s]);
                VelocitySampler::new(self.sampling, &stages.u_hat[s], grid)
            })
            .collect::<Result<Vec<_>>>()?;
        for (x, a) in self.x.iter_mut().zip(self.a.iter_mut()) {
            let (x0, a0) = (*x, *a);
            let j1 = samplers[0].jet(x0);
            let (k1x, k1a) = (j1.u, mat_mul(&j1.grad, &a0));
            let (x2, a2) = (axpy3(x0, 0.5 * dt, k1x), axpy_mat(&a0, 0.5 * dt, &k1a));
            let j2 = samplers[1].jet(x2);
            let (k2x, k2a) = (j2.u, mat_mul(&j2.grad, &a2));
            let (x3, a3) = (axpy3(x0, 0.5 * dt, k2x), axpy_mat(&a0, 0.5 * dt, &k2a));
            let j3 = samplers[2].jet(x3);
            let (k3x, k3a) = (j3.u, mat_mul(&j3.grad, &a3));
            let (x4, a4) = (axpy3(x0, dt, k3x), axpy_mat(&a0, dt, &k3a));
            let j4 = samplers[3].jet(x4);
            let (k4x, k4a) = (j4.u, mat_mul(&j4.grad, &a4));
            for i in 0..3 {
                x[i] = x0[i] + dt / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
                for j in 0..3 {
                    a[i][j] = a0[i][j]
                        + dt / 6.0 * (k1a[i][j] + 2.0 * k2a[i][j] + 2.0 * k3a[i][j] + k4a[i][j]);
                }
            }
        }
        self.t += dt;
        Ok(())
    }

    /// Sample vorticity and pressure derivatives at the current positions.
    pub fn record(&mut self, snap: &Snapshot<'_>) -> Result<()> {
        let scale = self.t.abs().max(1.0);
        if (snap.t - self.t).abs() > 1e-12 * scale {
            return Err(Error::Consistency(format!(
                "snapshot at t={} but particles are at t={}",
                snap.t, self.t
            )));
        }
        if let Some(last) = self.trace_t.last() {
            if !(self.t > *last) {
                return Err(Error::Consistency(format!(
                    "history time {} does not advance past {last}",
                    self.t
                )));
            }
        }
        let vel = VelocitySampler::new(self.sampling, snap.u_hat, snap.grid)?;
        let pres = PressureSampler::new(self.sampling, snap.pressure);
        let np = self.len();
        let mut sample = HistorySample {
            t: self.t,
            x: self.x.clone(),
            a: self.a.clone(),
            omega: Vec::with_capacity(np),
            grad_p: Vec::with_capacity(np),
            hess_p: Vec::with_capacity(np),
        };
        for (p, &x) in self.x.iter().enumerate() {
            let w = vel.jet(x).vorticity();
            let pj = pres.jet(x);
            self.trace_hess[p].push(sym_operator_norm(pj.hess));
            self.trace_vort[p].push(norm(w));
            sample.omega.push(w);
            sample.grad_p.push(pj.grad);
            sample.hess_p.push(pj.hess);
        }
        self.trace_t.push(self.t);
        if self.history_cap > 0 && self.history.len() == self.history_cap {
            self.history.pop_front();
        }
        self.history.push_back(sample);
        Ok(())
    }
}

/// `m³` labels on a uniform lattice offset by half a cell.
pub fn lattice_labels(m: usize) -> Vec<[f64; 3]> {
    let h = 2.0 * PI / m as f64;
    let mut out = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                out.push([(i as f64 + 0.5) * h, (j as f64 + 0.5) * h, (k as f64 + 0.5) * h]);
            }
        }
    }
    out
}

/// Grid node where `|ω|` is largest.
pub fn vorticity_max_location(u_hat: &SpectralField) -> [f64; 3] {
    let w = inverse(&curl(u_hat));
    let grid = w.grid();
    let mut best = (0usize, -1.0);
    for idx in 0..grid.points() {
        let m = norm(w.vec_at(idx));
        if m > best.1 {
            best = (idx, m);
        }
    }
    grid.coords(best.0)
}
