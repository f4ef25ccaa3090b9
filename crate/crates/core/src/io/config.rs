//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. `ball.center` and
//! `ball.radius` may repeat; the k-th center pairs with the k-th radius.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lagrangian::Sampling;
use crate::pressure::BallSpec;
use crate::solver::{InitialCondition, StepControl};
use crate::spectral::GridSpec;

/// Environment variable that relocates relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "EULER_DIAG_OUTPUT_ROOT";

const KEYS: &[&str] = &[
    "grid.n",
    "time.dt",
    "time.cfl",
    "time.dt_max",
    "time.t_end",
    "ic.kind",
    "ic.amplitude",
    "ic.a",
    "ic.b",
    "ic.c",
    "ic.sin",
    "ic.cos",
    "ic.slope",
    "ic.k_max",
    "dealias.rule",
    "particles.m",
    "particles.sampling",
    "particles.restart_time",
    "particles.seed_max_vorticity",
    "diag.interval",
    "ball.center",
    "ball.radius",
    "output.dir",
    "checkpoint.interval",
    "seed",
];

const REPEATABLE: &[&str] = &["ball.center", "ball.radius"];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid_n: usize,
    pub step: StepControl,
    pub t_end: f64,
    pub ic: InitialCondition,
    pub dealias_rule: String,
    /// Lattice side; zero disables particles.
    pub particles_m: usize,
    pub sampling: Sampling,
    pub restart_time: Option<f64>,
    pub seed_max_vorticity: bool,
    /// Steps between norm samples.
    pub diag_interval: usize,
    pub balls: Vec<([f64; 3], f64)>,
    pub output_dir: PathBuf,
    /// Steps between checkpoints; zero writes only the first and last.
    pub checkpoint_interval: usize,
    pub seed: u64,
    entries: Vec<(String, String)>,
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_num(key, s)).collect()
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{key} must be positive, got {v}")))
    }
}

struct Entries {
    single: BTreeMap<String, (usize, String)>,
    repeated: BTreeMap<String, Vec<String>>,
}

impl Entries {
    fn get(&self, key: &str) -> Option<&str> {
        self.single.get(key).map(|(_, v)| v.as_str())
    }

    fn num<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key).map(|v| parse_num(key, v)).transpose()
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.num(key)?
            .ok_or_else(|| Error::Config(format!("missing required key {key}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Entries {
            single: BTreeMap::new(),
            repeated: BTreeMap::new(),
        };
        let mut echo = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: no + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::Parse {
                    line: no + 1,
                    msg: format!("unknown key {k:?}"),
                });
            }
            echo.push((k.clone(), v.clone()));
            if REPEATABLE.contains(&k.as_str()) {
                entries.repeated.entry(k).or_default().push(v);
            } else if let Some((first, _)) = entries.single.get(&k) {
                return Err(Error::Parse {
                    line: no + 1,
                    msg: format!("key {k:?} already set on line {first}"),
                });
            } else {
                entries.single.insert(k, (no + 1, v));
            }
        }
        Self::from_entries(&entries, echo)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn from_entries(e: &Entries, echo: Vec<(String, String)>) -> Result<Self> {
        let grid_n: usize = e.require("grid.n")?;
        let grid = GridSpec::new(grid_n)?;
        let t_end = positive("time.t_end", e.require("time.t_end")?)?;
        let step = match (e.num::<f64>("time.dt")?, e.num::<f64>("time.cfl")?) {
            (Some(dt), None) => StepControl::Fixed(positive("time.dt", dt)?),
            (None, Some(cfl)) => {
                let dt_max = e.num::<f64>("time.dt_max")?.unwrap_or(t_end);
                if !(cfl > 0.0 && cfl <= 1.0) {
                    return Err(Error::Config(format!("time.cfl must lie in (0, 1], got {cfl}")));
                }
                StepControl::Cfl {
                    cfl,
                    dt_max: positive("time.dt_max", dt_max)?,
                }
            }
            _ => return Err(Error::Config("set exactly one of time.dt and time.cfl".into())),
        };
        let seed = e.num("seed")?.unwrap_or(0);
        let kind = e.get("ic.kind").ok_or_else(|| Error::Config("missing required key ic.kind".into()))?;
        let ic = match kind {
            "taylor_green" => InitialCondition::TaylorGreen {
                amplitude: e.num("ic.amplitude")?.unwrap_or(1.0),
            },
            "abc" => InitialCondition::Abc {
                a: e.num("ic.a")?.unwrap_or(1.0),
                b: e.num("ic.b")?.unwrap_or(1.0),
                c: e.num("ic.c")?.unwrap_or(1.0),
            },
            "shear" => InitialCondition::Shear {
                sin: parse_list("ic.sin", e.get("ic.sin").unwrap_or("1"))?,
                cos: parse_list("ic.cos", e.get("ic.cos").unwrap_or(""))?,
            },
            "random_solenoidal" => InitialCondition::RandomSolenoidal {
                amplitude: positive("ic.amplitude", e.num("ic.amplitude")?.unwrap_or(1.0))?,
                slope: e.num("ic.slope")?.unwrap_or(5.0 / 3.0),
                k_max: e.num("ic.k_max")?,
                seed,
            },
            other => return Err(Error::Config(format!("unknown ic.kind {other:?}"))),
        };
        let dealias_rule = e.get("dealias.rule").unwrap_or("2/3").to_string();
        if dealias_rule != "2/3" {
            return Err(Error::Config(format!(
                "dealias.rule is fixed to 2/3, got {dealias_rule:?}"
            )));
        }
        let centers = e.repeated.get("ball.center").cloned().unwrap_or_default();
        let radii = e.repeated.get("ball.radius").cloned().unwrap_or_default();
        if centers.len() != radii.len() {
            return Err(Error::Config(format!(
                "{} ball.center entries but {} ball.radius entries",
                centers.len(),
                radii.len()
            )));
        }
        let mut balls = Vec::with_capacity(centers.len());
        for (c, r) in centers.iter().zip(&radii) {
            let c = parse_list("ball.center", c)?;
            let c: [f64; 3] = c
                .try_into()
                .map_err(|_| Error::Config("ball.center needs three coordinates".into()))?;
            let r: f64 = parse_num("ball.radius", r)?;
            let ball = BallSpec::new(c, r)?;
            crate::pressure::ball_nodes(grid, &ball)?;
            balls.push((ball.center(), ball.radius()));
        }
        let restart_time = e.num::<f64>("particles.restart_time")?;
        if let Some(r) = restart_time {
            if !(r > 0.0 && r < t_end) {
                return Err(Error::Config(format!(
                    "particles.restart_time must lie in (0, t_end), got {r}"
                )));
            }
        }
        let seed_max_vorticity = match e.get("particles.seed_max_vorticity") {
            None | Some("false") => false,
            Some("true") => true,
            Some(v) => {
                return Err(Error::Config(format!(
                    "particles.seed_max_vorticity must be true or false, got {v:?}"
                )))
            }
        };
        let diag_interval: usize = e.num("diag.interval")?.unwrap_or(1);
        if diag_interval == 0 {
            return Err(Error::Config("diag.interval must be positive".into()));
        }
        Ok(Self {
            grid_n,
            step,
            t_end,
            ic,
            dealias_rule,
            particles_m: e.num("particles.m")?.unwrap_or(0),
            sampling: e
                .get("particles.sampling")
                .map(Sampling::from_str)
                .transpose()?
                .unwrap_or(Sampling::Trilinear),
            restart_time,
            seed_max_vorticity,
            diag_interval,
            balls,
            output_dir: PathBuf::from(e.get("output.dir").unwrap_or("run")),
            checkpoint_interval: e.num("checkpoint.interval")?.unwrap_or(0),
            seed,
            entries: echo,
        })
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::new(self.grid_n).expect("validated at parse time")
    }

    /// The accepted entries, in file order.
    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Normalised text form; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// Output directory, relocated under the output-root variable when
    /// that is set and the configured path is relative.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if self.output_dir.is_relative() => PathBuf::from(root).join(&self.output_dir),
            _ => self.output_dir.clone(),
        }
    }
}
