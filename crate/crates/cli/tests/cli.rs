use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_eulerdiag");

fn run(args: &[&str], root: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match root {
        Some(r) => cmd.env("EULER_DIAG_OUTPUT_ROOT", r),
        None => cmd.env_remove("EULER_DIAG_OUTPUT_ROOT"),
    };
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

const SHEAR: &str = "grid.n = 16
time.dt = 0.02
time.t_end = 0.1
ic.kind = shear
ic.sin = 1
particles.m = 2
particles.sampling = fourier
checkpoint.interval = 1
ball.center = 3.14159, 3.14159, 3.14159
ball.radius = 1.5
output.dir = shear_run
";

#[test]
fn simulate_diagnose_particles_pipeline() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("shear.cfg");
    fs::write(&cfg, SHEAR).unwrap();

    let sim = run(&["simulate", cfg.to_str().unwrap()], Some(root.path()));
    assert!(sim.status.success(), "{}", String::from_utf8_lossy(&sim.stderr));
    assert_eq!(json(&sim)["steps"], 5);
    let dir = root.path().join("shear_run");
    for f in ["series.csv", "particles.csv", "manifest.json", "summary.json", "config.txt"] {
        assert!(dir.join(f).exists(), "missing {f}");
    }

    let series = dir.join("series.csv");
    let diag = run(&["diagnose", series.to_str().unwrap()], None);
    assert_eq!(diag.status.code(), Some(0), "{}", String::from_utf8_lossy(&diag.stderr));
    let report = json(&diag);
    assert_eq!(report["provenance"]["region"], "global");
    assert_eq!(report["f_nested"]["agree"], true);

    let local = run(
        &["diagnose", series.to_str().unwrap(), "--ball", "0", "--window", "0.02,0.08", "--t-ref", "0.1"],
        None,
    );
    assert_eq!(local.status.code(), Some(0));
    let report = json(&local);
    assert_eq!(report["provenance"]["window"][0], 0.02);
    assert_eq!(report["provenance"]["ball_radius"], 1.5);

    let parts = run(&["particles", dir.to_str().unwrap()], None);
    assert_eq!(parts.status.code(), Some(0), "{}", String::from_utf8_lossy(&parts.stderr));
    let summary = json(&parts);
    assert_eq!(summary["checkpoints"], 6);
    assert!(summary["cauchy_max"].as_f64().unwrap() < 1e-8);
    assert!(dir.join("residual_second_derivative.csv").exists());
}

#[test]
fn malformed_series_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(
        &path,
        "t,hess_sup,vort_sup,gradu_sup,mu_sup,energy\n0,0,0,0,0,1\n0.1,0,zero,0,0,1\n",
    )
    .unwrap();
    let out = run(&["diagnose", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn violated_inequality_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inconsistent.csv");
    let mut text = String::from(
        "# omega0_sup=1e0\n# stretch0_sup=0e0\nt,hess_sup,vort_sup,gradu_sup,mu_sup,energy\n",
    );
    for k in 0..5 {
        text.push_str(&format!("{},0,5,0,0,1\n", k as f64 * 0.1));
    }
    fs::write(&path, text).unwrap();
    let out = run(&["diagnose", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(!json(&out)["violations"].as_array().unwrap().is_empty());
}

#[test]
fn synthetic_reports_bound_limit_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("f.svg");
    let out = run(
        &[
            "synthetic", "--eta", "0.5", "--t0", "0", "--T", "1", "--cuts", "6",
            "--nodes-per-efold", "200", "--svg", svg.to_str().unwrap(),
        ],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["bound_limit"], 2.0);
    assert_eq!(report["cuts"].as_array().unwrap().len(), 7);
    assert!(fs::read_to_string(&svg).unwrap().contains("<svg"));

    let zero = run(&["synthetic", "--eta", "0", "--T", "1", "--cuts", "3"], None);
    assert!(zero.status.success());
    let bad = run(&["synthetic", "--eta", "-0.5", "--T", "1"], None);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn particles_without_cadence_is_not_ready() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("c.cfg");
    fs::write(&cfg, SHEAR.replace("checkpoint.interval = 1", "checkpoint.interval = 0")).unwrap();
    assert!(run(&["simulate", cfg.to_str().unwrap()], Some(root.path())).status.success());
    let out = run(&["particles", root.path().join("shear_run").to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not ready"));
}
