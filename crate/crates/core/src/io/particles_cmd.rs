use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::manifest::write_atomic;
use super::simulate::{particle_labels, GronwallSummary, CHECKPOINT_DIR, CONFIG_FILE};
use crate::error::{Error, Result};
use crate::lagrangian::{
    cauchy_residual_at, gronwall_bound_check, norm, residual_order, residual_series, ParticleSet,
    ResidualKind, ResidualSeries, Snapshot,
};
use crate::pressure::pressure_pack;
use crate::solver::{read_state, Solver, SolverState};

pub const CAUCHY_TABLE: &str = "residual_cauchy.csv";
pub const SECOND_DERIVATIVE_TABLE: &str = "residual_second_derivative.csv";
pub const ACCELERATION_TABLE: &str = "residual_acceleration.csv";
pub const RESIDUAL_SUMMARY: &str = "residual_summary.json";

/// Fewest checkpoints for one centred stencil, and for the stride-2
/// order comparison.
const MIN_CHECKPOINTS: usize = 3;
const ORDER_CHECKPOINTS: usize = 5;

/// Lattice side used when the run itself tracked no particles.
const DEFAULT_LATTICE: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KindSummary {
    pub max_residual: f64,
    /// Observed order from stride 1 vs stride 2 (needs five checkpoints).
    pub order: Option<f64>,
    pub min_order_per_time: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub checkpoints: usize,
    pub particles: usize,
    pub sampling: String,
    pub cadence: Vec<f64>,
    pub cauchy_max: f64,
    pub det_drift: f64,
    pub second_derivative: KindSummary,
    pub acceleration: KindSummary,
    pub gronwall: GronwallSummary,
}

#[derive(Clone, Debug)]
pub struct ParticlesOutcome {
    pub summary: ResidualSummary,
    pub files: Vec<PathBuf>,
}

fn checkpoint_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir.join(CHECKPOINT_DIR))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "bin"))
        .collect();
    files.sort();
    Ok(files)
}

fn load(path: &Path) -> Result<SolverState> {
    read_state(&mut fs::File::open(path)?)
}

fn residual_table(
    kind: ResidualKind,
    ps: &ParticleSet,
    enough_for_order: bool,
) -> Result<(String, KindSummary)> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    w.write_record([
        "t",
        "particle_id",
        "residual_1",
        "residual_2",
        "residual_3",
        "residual_norm",
        "residual_norm_coarse",
        "order_particle",
        "order",
    ])
    .map_err(io)?;
    let (fine, coarse, orders, overall): (ResidualSeries, Option<ResidualSeries>, Vec<Option<f64>>, Option<f64>) =
        if enough_for_order {
            let c = residual_order(ps, kind)?;
            (c.fine, Some(c.coarse), c.order, c.overall)
        } else {
            let f = residual_series(ps, kind, 1)?;
            let n = f.t.len();
            (f, None, vec![None; n], None)
        };
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for (k, t) in fine.t.iter().enumerate() {
        for (p, r) in fine.residual[k].iter().enumerate() {
            let rn = norm(*r);
            let cn = coarse.as_ref().map(|c| norm(c.residual[k][p]));
            let op = cn.filter(|c| *c > 0.0 && rn > 0.0).map(|c| (c / rn).log2());
            let rec = [
                format!("{t:e}"),
                p.to_string(),
                format!("{:e}", r[0]),
                format!("{:e}", r[1]),
                format!("{:e}", r[2]),
                format!("{rn:e}"),
                opt(cn),
                opt(op),
                opt(orders[k]),
            ];
            w.write_record(&rec).map_err(io)?;
        }
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| io(e.into_error().into()))?)
        .map_err(|e| Error::Input(e.to_string()))?;
    let summary = KindSummary {
        max_residual: fine.max_norm.iter().copied().fold(0.0, f64::max),
        order: overall,
        min_order_per_time: orders.iter().flatten().copied().reduce(f64::min),
    };
    Ok((text, summary))
}

/// Recompute particle trajectories for a finished run from its first
/// checkpoint, record them at every later checkpoint, and write the
/// Cauchy, second-derivative and acceleration residual tables.
///
/// The replay must reproduce every checkpoint bit for bit.
pub fn cmd_particles(run_dir: &Path) -> Result<ParticlesOutcome> {
    let cfg = RunConfig::load(&run_dir.join(CONFIG_FILE))?;
    let files = checkpoint_files(run_dir)?;
    if files.len() < MIN_CHECKPOINTS {
        let steps = match files.last() {
            Some(f) => load(f)?.step_index,
            None => 0,
        };
        return Err(Error::NotReady(format!(
            "found {} checkpoint(s); residual stencils need at least {MIN_CHECKPOINTS} \
             ({ORDER_CHECKPOINTS} for order columns) at uniform cadence; rerun with \
             checkpoint.interval <= {}",
            files.len(),
            (steps / (ORDER_CHECKPOINTS as u64 - 1)).max(1)
        )));
    }
    let states = files.iter().map(|f| load(f)).collect::<Result<Vec<_>>>()?;

    let mut solver = Solver::new(states[0].clone(), cfg.step)?;
    let mut cfg_particles = cfg.clone();
    if cfg_particles.particles_m == 0 {
        cfg_particles.particles_m = DEFAULT_LATTICE;
    }
    let pack = pressure_pack(&solver.state.u_hat)?;
    let labels = particle_labels(&cfg_particles, &solver.state.u_hat);
    let mut ps = ParticleSet::new(
        labels,
        cfg.sampling,
        &Snapshot {
            t: solver.state.t,
            u_hat: &solver.state.u_hat,
            grid: None,
            pressure: &pack,
        },
        0,
    )?;
    let keep_grid = cfg.sampling == crate::lagrangian::Sampling::Trilinear;
    for target in &states[1..] {
        while solver.state.step_index < target.step_index {
            let dt = solver.next_dt(cfg.t_end)?;
            let stages = solver.step_with_stages(dt, keep_grid)?;
            ps.advance(&stages, dt)?;
        }
        solver.state.canonicalize();
        if solver.state.u_hat != target.u_hat || solver.state.t != target.t {
            return Err(Error::Consistency(format!(
                "replay diverged from checkpoint at step {}",
                target.step_index
            )));
        }
        let pack = pressure_pack(&solver.state.u_hat)?;
        ps.record(&Snapshot {
            t: solver.state.t,
            u_hat: &solver.state.u_hat,
            grid: None,
            pressure: &pack,
        })?;
    }

    let mut cauchy_max = 0.0f64;
    let mut cw = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    cw.write_record(["t", "particle_id", "diff_1", "diff_2", "diff_3", "cauchy_rel"])
        .map_err(io)?;
    for sample in ps.history() {
        let c = cauchy_residual_at(&ps, sample);
        cauchy_max = cauchy_max.max(c.max);
        for (p, (d, r)) in c.difference.iter().zip(&c.relative).enumerate() {
            cw.write_record([
                format!("{:e}", sample.t),
                p.to_string(),
                format!("{:e}", d[0]),
                format!("{:e}", d[1]),
                format!("{:e}", d[2]),
                format!("{r:e}"),
            ])
            .map_err(io)?;
        }
    }
    let cauchy_text = cw.into_inner().map_err(|e| io(e.into_error().into()))?;

    let enough = states.len() >= ORDER_CHECKPOINTS;
    let (sd_text, sd) = residual_table(ResidualKind::SecondDerivative, &ps, enough)?;
    let (acc_text, acc) = residual_table(ResidualKind::Acceleration, &ps, enough)?;
    let g = gronwall_bound_check(&ps)?;
    let times: Vec<f64> = states.iter().map(|s| s.t).collect();
    let summary = ResidualSummary {
        checkpoints: states.len(),
        particles: ps.len(),
        sampling: cfg.sampling.to_string(),
        cadence: times.windows(2).map(|w| w[1] - w[0]).collect(),
        cauchy_max,
        det_drift: ps.det_drift(),
        second_derivative: sd,
        acceleration: acc,
        gronwall: GronwallSummary {
            min_margin: g.min_margin,
            min_slack: g.min_slack,
            violations: g.violations,
            worst_particle: g.worst_particle,
            worst_time: g.worst_time,
        },
    };
    let outputs = [
        (CAUCHY_TABLE, cauchy_text),
        (SECOND_DERIVATIVE_TABLE, sd_text.into_bytes()),
        (ACCELERATION_TABLE, acc_text.into_bytes()),
        (RESIDUAL_SUMMARY, serde_json::to_vec_pretty(&summary)?),
    ];
    let mut written = Vec::new();
    for (name, bytes) in outputs {
        let path = run_dir.join(name);
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    Ok(ParticlesOutcome {
        summary,
        files: written,
    })
}
