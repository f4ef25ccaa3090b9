use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::spectral::{
    dealias_in_place, forward, inverse, leray_project_in_place, read_field, write_field, Layout,
    RealField, SpectralField,
};

/// Divergence-free spectral velocity plus the simulation clock.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub u_hat: SpectralField,
    pub t: f64,
    pub step_index: u64,
    /// Size of the most recent step (zero before the first step).
    pub dt: f64,
}

impl SolverState {
    pub fn new(u_hat: SpectralField) -> Self {
        Self {
            u_hat,
            t: 0.0,
            step_index: 0,
            dt: 0.0,
        }
    }

    /// Replace the velocity by its reconstruction from grid samples and
    /// return those samples. A restart from the samples reproduces the
    /// canonicalised state bit for bit.
    pub fn canonicalize(&mut self) -> RealField {
        let samples = inverse(&self.u_hat);
        self.u_hat = canonical_from_samples(&samples);
        samples
    }
}

fn canonical_from_samples(u: &RealField) -> SpectralField {
    let mut u_hat = forward(u);
    dealias_in_place(&mut u_hat);
    leray_project_in_place(&mut u_hat);
    u_hat
}

/// Field checkpoint of the grid velocity followed by `t: f64`,
/// `step_index: u64`, `dt: f64` (all little-endian).
///
/// The state is canonicalised first, so continuing from `state` and
/// restarting from the written file give identical trajectories.
pub fn write_state<W: Write>(w: &mut W, state: &mut SolverState) -> Result<()> {
    let samples = state.canonicalize();
    write_field(w, &samples)?;
    w.write_all(&state.t.to_le_bytes())?;
    w.write_all(&state.step_index.to_le_bytes())?;
    w.write_all(&state.dt.to_le_bytes())?;
    Ok(())
}

pub fn read_state<R: Read>(r: &mut R) -> Result<SolverState> {
    let u = read_field(r)?;
    if u.layout() != Layout::Vector {
        return Err(Error::Input("checkpoint does not hold a velocity field".into()));
    }
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let t = f64::from_le_bytes(b);
    r.read_exact(&mut b)?;
    let step_index = u64::from_le_bytes(b);
    r.read_exact(&mut b)?;
    let dt = f64::from_le_bytes(b);
    Ok(SolverState {
        u_hat: canonical_from_samples(&u),
        t,
        step_index,
        dt,
    })
}
