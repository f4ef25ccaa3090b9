use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::diagnostics::{sample_flow, vorticity_and_stretching_sup, FlowSample};
use super::manifest::{temp_path, unix_now, write_atomic, RunManifest, RunStatus};
use super::particles_csv::ParticleWriter;
use super::series_csv::SeriesWriter;
use crate::criteria::{NormSeries, SeriesMeta};
use crate::error::{Error, Result};
use crate::lagrangian::{
    cauchy_residual, gronwall_bound_check, lattice_labels, vorticity_max_location, ParticleSet,
    Snapshot,
};
use crate::pressure::BallSpec;
use crate::solver::{make_initial, write_state, Solver, SolverState};

pub const SERIES_FILE: &str = "series.csv";
pub const PARTICLES_FILE: &str = "particles.csv";
pub const CONFIG_FILE: &str = "config.txt";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CHECKPOINT_DIR: &str = "checkpoints";

/// History kept in memory during a run; residual tables are produced
/// offline from checkpoints.
const LIVE_HISTORY: usize = 3;

pub fn checkpoint_name(step: u64) -> String {
    format!("{CHECKPOINT_DIR}/step_{step:08}.bin")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GronwallSummary {
    pub min_margin: f64,
    pub min_slack: f64,
    pub violations: usize,
    pub worst_particle: usize,
    pub worst_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleSummary {
    pub count: usize,
    pub sampling: String,
    pub t_seed: f64,
    pub det_drift: f64,
    /// Largest relative Cauchy residual over all recorded samples.
    pub cauchy_max: f64,
    pub gronwall: GronwallSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub steps: u64,
    pub t_final: f64,
    pub samples: usize,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub energy_drift_rel: f64,
    pub particles: Option<ParticleSummary>,
}

#[derive(Clone, Debug)]
pub struct SimulateOutcome {
    pub dir: PathBuf,
    pub manifest: RunManifest,
    pub summary: RunSummary,
}

impl SimulateOutcome {
    pub fn aborted(&self) -> bool {
        self.manifest.status == RunStatus::Aborted
    }
}

struct Run {
    dir: PathBuf,
    files: Vec<String>,
}

impl Run {
    fn checkpoint(&mut self, state: &mut SolverState) -> Result<()> {
        let rel = checkpoint_name(state.step_index);
        if self.files.contains(&rel) {
            return Ok(());
        }
        let mut buf = Vec::new();
        write_state(&mut buf, state)?;
        write_atomic(&self.dir.join(&rel), &buf)?;
        self.files.push(rel);
        Ok(())
    }
}

pub fn particle_labels(cfg: &RunConfig, u_hat: &crate::spectral::SpectralField) -> Vec<[f64; 3]> {
    let mut labels = lattice_labels(cfg.particles_m);
    if cfg.seed_max_vorticity {
        labels.push(vorticity_max_location(u_hat));
    }
    labels
}

/// Run the solver described by `cfg`, writing the series CSV, particle
/// CSV, checkpoints, a summary and the manifest into the output directory.
///
/// An instability stops the run; the outputs so far are kept and the
/// manifest is marked aborted.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<SimulateOutcome> {
    let start_unix = unix_now();
    let dir = cfg.resolved_output_dir();
    fs::create_dir_all(dir.join(CHECKPOINT_DIR))?;
    write_atomic(&dir.join(CONFIG_FILE), cfg.to_text().as_bytes())?;
    let mut run = Run {
        dir: dir.clone(),
        files: vec![CONFIG_FILE.to_string()],
    };

    let grid = cfg.grid();
    let balls = cfg
        .balls
        .iter()
        .map(|(c, r)| BallSpec::new(*c, *r))
        .collect::<Result<Vec<_>>>()?;
    let mut state = SolverState::new(make_initial(&cfg.ic, grid)?);
    run.checkpoint(&mut state)?;
    let mut solver = Solver::new(state, cfg.step)?;

    let first = sample_flow(&solver.state.u_hat, 0.0, &balls)?;
    let (omega0_sup, stretch0_sup) = vorticity_and_stretching_sup(&first.velocity);
    let header = NormSeries::with_balls(
        &cfg.balls,
        SeriesMeta {
            grid_n: Some(cfg.grid_n),
            sampling: Some(cfg.sampling.to_string()),
            omega0_sup: Some(omega0_sup),
            stretch0_sup: Some(stretch0_sup),
        },
    );
    let series_path = dir.join(SERIES_FILE);
    let mut series = SeriesWriter::new(BufWriter::new(File::create(temp_path(&series_path))?), &header)?;

    let particles_path = dir.join(PARTICLES_FILE);
    let mut particle_out = if cfg.particles_m > 0 || cfg.seed_max_vorticity {
        Some(ParticleWriter::new(BufWriter::new(File::create(temp_path(&particles_path))?))?)
    } else {
        None
    };
    let mut particles: Option<ParticleSet> = None;
    let mut restarted = cfg.restart_time.is_none();
    let mut cauchy_max = 0.0f64;
    let energy_initial = first.norms.energy;
    let mut energy_final = energy_initial;
    let mut samples = 0usize;
    let keep_grid = cfg.sampling == crate::lagrangian::Sampling::Trilinear;

    let mut record = |flow: &FlowSample,
                      solver: &Solver,
                      particles: &mut Option<ParticleSet>,
                      restarted: &mut bool,
                      series: &mut SeriesWriter<BufWriter<File>>|
     -> Result<()> {
        series.row(&flow.norms)?;
        samples += 1;
        energy_final = flow.norms.energy;
        let Some(out) = particle_out.as_mut() else {
            return Ok(());
        };
        let snap = Snapshot {
            t: solver.state.t,
            u_hat: &solver.state.u_hat,
            grid: Some(&flow.velocity),
            pressure: &flow.pressure,
        };
        let restart_now = !*restarted && cfg.restart_time.is_some_and(|r| solver.state.t >= r);
        match particles.as_mut() {
            None => {
                let labels = particle_labels(cfg, &solver.state.u_hat);
                *particles = Some(ParticleSet::new(labels, cfg.sampling, &snap, LIVE_HISTORY)?);
            }
            Some(ps) if restart_now => {
                *particles = Some(ps.restart(&snap)?);
                *restarted = true;
            }
            Some(ps) => ps.record(&snap)?,
        }
        let ps = particles.as_ref().expect("seeded above");
        let cauchy = cauchy_residual(ps)?;
        cauchy_max = cauchy_max.max(cauchy.max);
        out.rows(ps, &cauchy)?;
        Ok(())
    };

    record(&first, &solver, &mut particles, &mut restarted, &mut series)?;
    drop(first);
    let done = |t: f64| t >= cfg.t_end * (1.0 - 1e-12);
    let mut abort_reason = None;
    while !done(solver.state.t) {
        let step = solver
            .next_dt(cfg.t_end)
            .and_then(|dt| solver.step_with_stages(dt, keep_grid).map(|s| (dt, s)));
        let (dt, stages) = match step {
            Ok(v) => v,
            Err(e @ Error::Instability { .. }) => {
                abort_reason = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        if let Some(ps) = particles.as_mut() {
            ps.advance(&stages, dt)?;
        }
        drop(stages);
        let k = solver.state.step_index;
        let last = done(solver.state.t);
        if last || (cfg.checkpoint_interval > 0 && k % cfg.checkpoint_interval as u64 == 0) {
            run.checkpoint(&mut solver.state)?;
        }
        if last || k % cfg.diag_interval as u64 == 0 {
            let flow = sample_flow(&solver.state.u_hat, solver.state.t, &balls)?;
            record(&flow, &solver, &mut particles, &mut restarted, &mut series)?;
        }
    }

    series.finish()?.flush()?;
    fs::rename(temp_path(&series_path), &series_path)?;
    run.files.insert(1, SERIES_FILE.to_string());
    if let Some(out) = particle_out {
        out.finish()?.flush()?;
        fs::rename(temp_path(&particles_path), &particles_path)?;
        run.files.insert(2, PARTICLES_FILE.to_string());
    }

    let particle_summary = particles
        .as_ref()
        .map(|ps| -> Result<ParticleSummary> {
            let g = gronwall_bound_check(ps)?;
            Ok(ParticleSummary {
                count: ps.len(),
                sampling: ps.sampling().to_string(),
                t_seed: ps.t_start(),
                det_drift: ps.det_drift(),
                cauchy_max,
                gronwall: GronwallSummary {
                    min_margin: g.min_margin,
                    min_slack: g.min_slack,
                    violations: g.violations,
                    worst_particle: g.worst_particle,
                    worst_time: g.worst_time,
                },
            })
        })
        .transpose()?;
    let summary = RunSummary {
        steps: solver.state.step_index,
        t_final: solver.state.t,
        samples,
        energy_initial,
        energy_final,
        energy_drift_rel: if energy_initial > 0.0 {
            (energy_final - energy_initial).abs() / energy_initial
        } else {
            (energy_final - energy_initial).abs()
        },
        particles: particle_summary,
    };
    write_atomic(&dir.join(SUMMARY_FILE), &serde_json::to_vec_pretty(&summary)?)?;
    run.files.push(SUMMARY_FILE.to_string());

    let manifest = RunManifest {
        status: if abort_reason.is_some() {
            RunStatus::Aborted
        } else {
            RunStatus::Completed
        },
        abort_reason,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.entries().to_vec(),
        start_unix,
        end_unix: unix_now(),
        files: RunManifest::checksum_files(&dir, &run.files)?,
    };
    manifest.write(&dir)?;
    Ok(SimulateOutcome {
        dir,
        manifest,
        summary,
    })
}

pub fn cmd_simulate_file(path: &Path) -> Result<SimulateOutcome> {
    cmd_simulate(&RunConfig::load(path)?)
}
