use std::fs;
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::criteria::{NormSample, NormSeries, SeriesMeta};
use crate::error::Error;
use crate::lagrangian::Sampling;
use crate::solver::StepControl;

fn config_text(dir: &Path, body: &str) -> String {
    format!("output.dir = {}\n{body}", dir.display())
}

fn shear_body(checkpoint_interval: usize) -> String {
    format!(
        "grid.n = 16\ntime.dt = 0.01\ntime.t_end = 0.06\nic.kind = shear\nic.sin = 1, 0.5\n\
         particles.m = 2\nparticles.sampling = fourier\ncheckpoint.interval = {checkpoint_interval}\n"
    )
}

#[test]
fn config_parses_and_round_trips() {
    let text = "# comment\n\ngrid.n = 16\ntime.cfl = 0.4\ntime.t_end = 0.5\nic.kind = taylor_green\n\
                ball.center = 1,1,1\nball.radius = 0.5\nball.center = 2,2,2\nball.radius = 1\n\
                particles.m = 3\nparticles.sampling = fourier\n";
    let cfg = RunConfig::parse(text).unwrap();
    assert_eq!(cfg.grid_n, 16);
    assert_eq!(cfg.step, StepControl::Cfl { cfl: 0.4, dt_max: 0.5 });
    assert_eq!(cfg.balls, vec![([1.0, 1.0, 1.0], 0.5), ([2.0, 2.0, 2.0], 1.0)]);
    assert_eq!(cfg.sampling, Sampling::Fourier);
    assert_eq!(cfg.diag_interval, 1);
    assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
}

#[test]
fn config_errors_carry_line_numbers() {
    let unknown = RunConfig::parse("grid.n = 16\n\ngrid.m = 3\n").unwrap_err();
    assert!(matches!(unknown, Error::Parse { line: 3, .. }), "{unknown}");
    let dup = RunConfig::parse("grid.n = 16\ngrid.n = 32\n").unwrap_err();
    assert!(matches!(dup, Error::Parse { line: 2, .. }), "{dup}");
    let no_eq = RunConfig::parse("grid.n 16\n").unwrap_err();
    assert!(matches!(no_eq, Error::Parse { line: 1, .. }));
}

#[test]
fn config_rejects_invalid_values() {
    let base = "grid.n = 16\ntime.t_end = 1\nic.kind = abc\n";
    for extra in [
        "time.dt = 0.1\ntime.cfl = 0.5\n",
        "",
        "time.dt = -1\n",
        "time.cfl = 1.5\n",
        "time.dt = 0.1\ndealias.rule = 1/2\n",
        "time.dt = 0.1\nball.center = 1,1,1\n",
        "time.dt = 0.1\nball.center = 1,1\nball.radius = 1\n",
        "time.dt = 0.1\nball.center = 1,1,1\nball.radius = 4\n",
        "time.dt = 0.1\nparticles.restart_time = 2\n",
        "time.dt = 0.1\ndiag.interval = 0\n",
        "time.dt = 0.1\nparticles.sampling = cubic\n",
    ] {
        let r = RunConfig::parse(&format!("{base}{extra}"));
        assert!(matches!(r, Err(Error::Config(_))), "{extra:?} gave {r:?}");
    }
    assert!(RunConfig::parse("grid.n = 15\ntime.t_end = 1\ntime.dt = 0.1\nic.kind = abc\n").is_err());
}

fn random_series(rng: &mut ChaCha8Rng, n: usize) -> NormSeries {
    let mut s = NormSeries::with_balls(
        &[([1.0, 2.0, 3.0], 0.75)],
        SeriesMeta {
            grid_n: Some(32),
            sampling: Some("fourier".into()),
            omega0_sup: Some(rng.random::<f64>() + 0.5),
            stretch0_sup: Some(rng.random::<f64>()),
        },
    );
    let mut t = 0.0;
    for _ in 0..n {
        t += 0.01 + 0.02 * rng.random::<f64>();
        let mut r = || rng.random::<f64>() * 10.0;
        let sample = NormSample {
            t,
            hess: r(),
            vort: r(),
            gradu: r(),
            mu: r(),
            energy: r(),
            balls: vec![[r(), r(), r()]],
        };
        s.push(&sample).unwrap();
    }
    s
}

#[test]
fn series_csv_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let series = random_series(&mut rng, 40);
    let text = series_to_string(&series).unwrap();
    let back = read_series(text.as_bytes()).unwrap();
    assert_eq!(back, series);

    for ball in [None, Some(0)] {
        let args = DiagnoseArgs {
            ball,
            ..DiagnoseArgs::default()
        };
        let a = diagnose_series(&series, &args).unwrap();
        let b = diagnose_series(&back, &args).unwrap();
        assert_eq!(a.report, b.report);
    }
}

#[test]
fn series_csv_reports_bad_row_line() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let text = series_to_string(&random_series(&mut rng, 5)).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let bad = lines.len() - 2;
    lines[bad] = lines[bad].replacen(',', ",oops,", 1);
    let err = read_series(lines.join("\n").as_bytes()).unwrap_err();
    match err {
        Error::Parse { line, .. } => assert_eq!(line, bad + 1),
        other => panic!("expected a parse error, got {other}"),
    }
}

#[test]
fn series_csv_rejects_ball_columns_without_metadata() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let text = series_to_string(&random_series(&mut rng, 3)).unwrap();
    let stripped: String = text
        .lines()
        .filter(|l| !l.starts_with("# ball"))
        .map(|l| format!("{l}\n"))
        .collect();
    assert!(read_series(stripped.as_bytes()).is_err());
}

#[test]
fn shear_run_is_steady_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(&config_text(dir.path(), &shear_body(1))).unwrap();
    let out = cmd_simulate(&cfg).unwrap();
    assert!(!out.aborted());
    assert_eq!(out.summary.steps, 6);
    assert!(out.summary.energy_drift_rel < 1e-14);
    out.manifest.verify(&out.dir).unwrap();
    assert_eq!(RunManifest::read(&out.dir).unwrap(), out.manifest);

    let series = read_series(fs::File::open(out.dir.join(SERIES_FILE)).unwrap()).unwrap();
    assert_eq!(series.len(), 7);
    for (h, w) in series.hess.iter().zip(&series.vort) {
        assert!(*h < 1e-12, "shear pressure Hessian {h}");
        assert!((w - series.vort[0]).abs() < 1e-12);
    }
    let ps = out.summary.particles.as_ref().unwrap();
    assert_eq!(ps.count, 8);
    assert_eq!(ps.gronwall.violations, 0);
    assert!(ps.cauchy_max < 1e-10);

    let particles = fs::read_to_string(out.dir.join(PARTICLES_FILE)).unwrap();
    assert_eq!(particles.lines().count(), 1 + 7 * 8);

    fs::write(out.dir.join(SERIES_FILE), "tampered").unwrap();
    assert!(matches!(out.manifest.verify(&out.dir), Err(Error::Consistency(_))));
}

#[test]
fn identical_configs_give_identical_files() {
    let body = "grid.n = 16\ntime.cfl = 0.5\ntime.t_end = 0.1\nic.kind = random_solenoidal\nseed = 5\n\
                particles.m = 2\ncheckpoint.interval = 2\nball.center = 3,3,3\nball.radius = 1\n";
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = cmd_simulate(&RunConfig::parse(&config_text(a.path(), body)).unwrap()).unwrap();
    let rb = cmd_simulate(&RunConfig::parse(&config_text(b.path(), body)).unwrap()).unwrap();
    let differs: Vec<_> = ra
        .manifest
        .files
        .iter()
        .zip(&rb.manifest.files)
        .filter(|(x, y)| x.path != CONFIG_FILE && x != y)
        .map(|(x, _)| x.path.clone())
        .collect();
    assert!(differs.is_empty(), "{differs:?}");
    assert_eq!(ra.manifest.files.len(), rb.manifest.files.len());
}

#[test]
fn particles_need_enough_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(&config_text(dir.path(), &shear_body(0))).unwrap();
    let out = cmd_simulate(&cfg).unwrap();
    let err = cmd_particles(&out.dir).unwrap_err();
    match err {
        Error::NotReady(msg) => assert!(msg.contains("checkpoint.interval"), "{msg}"),
        other => panic!("expected NotReady, got {other}"),
    }
}

#[test]
fn shear_particle_tables_vanish() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(&config_text(dir.path(), &shear_body(1))).unwrap();
    let out = cmd_simulate(&cfg).unwrap();
    let res = cmd_particles(&out.dir).unwrap();
    let s = &res.summary;
    assert_eq!(s.checkpoints, 7);
    assert!(s.cauchy_max < 1e-8, "{}", s.cauchy_max);
    assert!(s.second_derivative.max_residual < 1e-8, "{}", s.second_derivative.max_residual);
    assert!(s.acceleration.max_residual < 1e-8, "{}", s.acceleration.max_residual);
    assert_eq!(s.gronwall.violations, 0);
    for f in &res.files {
        assert!(f.exists());
    }
    let table = fs::read_to_string(out.dir.join(SECOND_DERIVATIVE_TABLE)).unwrap();
    assert!(table.starts_with("t,particle_id,residual_1"));
}

#[test]
fn synthetic_command_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("chart.svg");
    let args = SyntheticArgs {
        eta: 0.5,
        t0: 0.0,
        t_end: 1.0,
        eps_cut: None,
        options: crate::criteria::SyntheticOptions {
            halvings: 6,
            nodes_per_efold: 200,
        },
    };
    let report = cmd_synthetic(&args, Some(&svg)).unwrap();
    assert_eq!(report.cuts.len(), 7);
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("polyline"));

    let zero = cmd_synthetic(&SyntheticArgs { eta: 0.0, ..args.clone() }, None).unwrap();
    assert!(zero.cuts.iter().all(|c| c.nested.reduced.value == 0.0));
    assert!(cmd_synthetic(&SyntheticArgs { eta: -1.0, ..args }, None).is_err());
}

#[test]
fn diagnose_flags_violation_exit_code() {
    let meta = SeriesMeta {
        omega0_sup: Some(1.0),
        stretch0_sup: Some(0.0),
        ..SeriesMeta::default()
    };
    let mut s = NormSeries::with_balls(&[], meta);
    // Vorticity well above what a unit initial vorticity and a zero
    // Hessian allow.
    for k in 0..5 {
        s.push(&NormSample {
            t: k as f64 * 0.1,
            vort: 5.0,
            energy: 1.0,
            ..NormSample::default()
        })
        .unwrap();
    }
    let out = diagnose_series(&s, &DiagnoseArgs::default()).unwrap();
    assert_eq!(out.exit_code, EXIT_VIOLATION, "{:?}", out.report.violations);
}
