use std::io::Write;

use crate::error::{Error, Result};
use crate::lagrangian::{mat_vec, CauchyReport, ParticleSet};

pub fn particle_header() -> Vec<String> {
    let mut h: Vec<String> = vec!["t".into(), "particle_id".into()];
    h.extend((1..=3).map(|i| format!("X{i}")));
    for i in 1..=3 {
        for j in 1..=3 {
            h.push(format!("A{i}{j}"));
        }
    }
    h.extend((1..=3).map(|i| format!("omega_interp_{i}")));
    h.extend((1..=3).map(|i| format!("cauchy_{i}")));
    h.push("cauchy_rel".into());
    h
}

/// Particle dump: one row per particle per recorded time. `cauchy_k` is
/// the Cauchy-formula prediction `(A ω₀)_k`; `cauchy_rel` its relative
/// residual against the interpolated vorticity.
pub struct ParticleWriter<W: Write> {
    inner: csv::Writer<W>,
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

impl<W: Write> ParticleWriter<W> {
    pub fn new(w: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(particle_header()).map_err(csv_io)?;
        Ok(Self { inner })
    }

    /// Rows for the latest record of `ps`.
    pub fn rows(&mut self, ps: &ParticleSet, cauchy: &CauchyReport) -> Result<()> {
        let sample = ps
            .latest()
            .ok_or_else(|| Error::NotReady("particle set has no record".into()))?;
        for p in 0..ps.len() {
            let mut rec = vec![format!("{:e}", sample.t), p.to_string()];
            let x = sample.x[p].map(|c| c.rem_euclid(2.0 * std::f64::consts::PI));
            rec.extend(x.iter().map(|v| format!("{v:e}")));
            rec.extend(sample.a[p].iter().flatten().map(|v| format!("{v:e}")));
            rec.extend(sample.omega[p].iter().map(|v| format!("{v:e}")));
            let pred = mat_vec(&sample.a[p], ps.omega0()[p]);
            rec.extend(pred.iter().map(|v| format!("{v:e}")));
            rec.push(format!("{:e}", cauchy.relative[p]));
            self.inner.write_record(&rec).map_err(csv_io)?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<W> {
        self.inner.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}
