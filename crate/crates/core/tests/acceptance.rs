//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --release --test acceptance`.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use eulerdiag::criteria::{
    bkm_integral, exp_criterion, global_report, keyforma_check, nested_functional,
    synthetic_profile, type_one_sup, window, NormSeries, ReportOptions, SyntheticOptions,
};
use eulerdiag::io::{cmd_particles, cmd_simulate, read_series, RunConfig, SERIES_FILE};
use eulerdiag::pressure::{pressure_pack, sup_norm, BallSpec};
use eulerdiag::solver::{make_initial, step, InitialCondition, Solver, SolverState, StepControl};
use eulerdiag::spectral::{inverse, GridSpec, Layout, RealField, SpectralField};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

struct Suite {
    results: Vec<(u32, &'static str, Check, f64)>,
    /// Norm series of every run made by the suite.
    recorded: Vec<(String, NormSeries)>,
}

impl Suite {
    fn run(&mut self, id: u32, name: &'static str, f: impl FnOnce(&mut Self) -> Check) {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(|| f(self))).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        eprintln!("[{id}] {name} finished in {secs:.1}s");
        self.results.push((id, name, out, secs));
    }
}

/// Collects sub-check outcomes into one criterion line.
#[derive(Default)]
struct Tally {
    notes: Vec<String>,
    failed: bool,
}

impl Tally {
    fn check(&mut self, ok: bool, note: String) {
        if !ok {
            self.failed = true;
            self.notes.push(format!("FAILED {note}"));
        } else {
            self.notes.push(note);
        }
    }

    fn finish(self) -> Check {
        let text = self.notes.join("; ");
        if self.failed {
            Err(text)
        } else {
            Ok(text)
        }
    }
}

fn simulate(dir: &Path, body: &str) -> Result<(eulerdiag::io::SimulateOutcome, NormSeries), String> {
    let cfg = RunConfig::parse(&format!("output.dir = {}\n{body}", dir.display())).map_err(|e| e.to_string())?;
    let out = cmd_simulate(&cfg).map_err(|e| e.to_string())?;
    let series = read_series(fs::File::open(out.dir.join(SERIES_FILE)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    Ok((out, series))
}

fn grid(n: usize) -> GridSpec {
    GridSpec::new(n).unwrap()
}

fn synthetic_sharpness(_: &mut Suite) -> Check {
    let mut t = Tally::default();
    let (t0, t_end) = (0.0, 1.0);
    let opts = SyntheticOptions::default();

    let eta = 0.5;
    let oracle = (t_end - t0) / (1.0 - eta);
    let r = synthetic_profile(eta, t0, t_end, 1e-2, opts).map_err(|e| e.to_string())?;
    let lim = r.final_bound_limit.ok_or("no extrapolated limit")?;
    t.check(
        (lim.value - oracle).abs() <= 1e-6,
        format!("eta=0.5 limit {:.9} vs {oracle} (|diff| {:.1e})", lim.value, (lim.value - oracle).abs()),
    );
    t.check(r.bound_limit == Some(oracle), format!("bound_limit {:?}", r.bound_limit));
    t.check(r.chain_dominated == Some(true), "bound chain ordered at every cut".into());

    // Cut halving scales increments of a (T-t)^(1-eta) profile by
    // 2^(eta-1); eta = 1 is the logarithmic case with ratio one.
    for eta in [1.0, 1.2] {
        let r = synthetic_profile(eta, t0, t_end, 1e-2, opts).map_err(|e| e.to_string())?;
        let expected = 1.0 - eta;
        let got = r.growth.measured_exponent;
        t.check(
            r.growth.diverges && (got - expected).abs() < 0.02,
            format!("eta={eta} diverges={} exponent {got:.4} vs {expected:.1}", r.growth.diverges),
        );
    }
    t.finish()
}

fn random_trace(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let n = 3 + (rng.random::<f64>() * 400.0) as usize;
    let mut t = vec![rng.random::<f64>()];
    for _ in 1..n {
        let dt = 1e-3 + 0.02 * rng.random::<f64>();
        t.push(t[t.len() - 1] + dt);
    }
    let scale = 3.0 * rng.random::<f64>();
    let (f1, f2) = (1.0 + 10.0 * rng.random::<f64>(), 10.0 * rng.random::<f64>());
    let g = t
        .iter()
        .map(|s| scale * ((f1 * s).sin().abs() + 0.3 * (f2 * s).cos().powi(2)) + 0.1 * rng.random::<f64>())
        .collect();
    (t, g)
}

fn dual_path(suite: &mut Suite) -> Check {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut bad = 0;
    for _ in 0..100 {
        let (ts, g) = random_trace(&mut rng);
        if !nested_functional(&ts, &g).map_err(|e| e.to_string())?.agree {
            bad += 1;
        }
    }
    t.check(bad == 0, format!("{bad}/100 random traces disagree"));

    let mut windows = 0;
    let mut worst = 0.0f64;
    for (name, s) in &suite.recorded {
        let mut traces = vec![(s.hess.clone(), "global")];
        traces.extend(s.balls.iter().map(|b| (b.hess.clone(), "ball")));
        let mut bad = 0;
        for (g, _) in &traces {
            for k in 1..s.len() {
                let r = nested_functional(&s.t[..=k], &g[..=k]).map_err(|e| e.to_string())?;
                windows += 1;
                let spread = (r.direct.value - r.reduced.value).abs();
                let allowed = r.direct.error + r.reduced.error;
                if allowed > 0.0 {
                    worst = worst.max(spread / allowed);
                }
                if !r.agree {
                    bad += 1;
                }
            }
        }
        let report = global_report(s, &ReportOptions::default()).map_err(|e| e.to_string())?;
        t.check(
            bad == 0 && report.violations.is_empty(),
            format!("run {name}: {bad} disagreeing prefix windows, report violations {:?}", report.violations),
        );
    }
    t.check(
        !suite.recorded.is_empty(),
        format!("{} recorded runs, {windows} windows, worst spread/error {worst:.2}", suite.recorded.len()),
    );
    t.finish()
}

fn inequality_suite(suite: &mut Suite) -> Check {
    let mut t = Tally::default();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let body = "grid.n = 64\ntime.cfl = 0.4\ntime.t_end = 0.5\nic.kind = taylor_green\n\
                particles.m = 10\nparticles.sampling = fourier\ndiag.interval = 1\n";
    let (out, series) = simulate(dir.path(), body)?;
    let p = out.summary.particles.as_ref().ok_or("run has no particles")?;
    t.check(
        p.count == 1000 && p.gronwall.violations == 0,
        format!(
            "pointwise bound: {} particles x {} samples, min slack {:.2e}, violations {}",
            p.count, series.len(), p.gronwall.min_slack, p.gronwall.violations
        ),
    );

    let (w0, s0) = (
        series.meta.omega0_sup.ok_or("series lacks initial norms")?,
        series.meta.stretch0_sup.ok_or("series lacks initial norms")?,
    );
    let mut min_slack = f64::INFINITY;
    let mut failures = 0;
    for k in 1..series.len() {
        let r = keyforma_check(&series.t[..=k], &series.vort[..=k], &series.hess[..=k], w0, s0)
            .map_err(|e| e.to_string())?;
        min_slack = min_slack.min(r.margin + r.tolerance);
        if !r.holds {
            failures += 1;
        }
    }
    t.check(
        failures == 0,
        format!("integrated inequality at {} sample ends, min slack {min_slack:.3e}", series.len() - 1),
    );

    // Energy of the Taylor-Green field is 1/8 at unit amplitude.
    let drift = (series.energy[series.len() - 1] - 0.125).abs() / 0.125;
    suite.recorded.push(("taylor_green_64".into(), series));
    t.check(drift <= 1e-6, format!("energy drift {drift:.2e} over [0, 0.5]"));
    t.finish()
}

fn lagrangian_identities(suite: &mut Suite) -> Check {
    let mut t = Tally::default();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let body = "grid.n = 32\ntime.dt = 0.02\ntime.t_end = 0.4\nic.kind = taylor_green\n\
                particles.m = 4\nparticles.sampling = fourier\ndiag.interval = 1\ncheckpoint.interval = 1\n";
    let (out, series) = simulate(dir.path(), body)?;
    suite.recorded.push(("taylor_green_32_fixed_dt".into(), series));
    let live = out.summary.particles.as_ref().ok_or("run has no particles")?.cauchy_max;
    let res = cmd_particles(&out.dir).map_err(|e| e.to_string())?;
    let s = res.summary;
    t.check(
        live <= 1e-4 && s.cauchy_max <= 1e-4,
        format!("Cauchy relative residual {:.2e} (live {live:.2e})", s.cauchy_max),
    );
    for (name, k) in [("second derivative", &s.second_derivative), ("acceleration", &s.acceleration)] {
        let order = k.order.unwrap_or(f64::NAN);
        t.check(
            order >= 1.8,
            format!(
                "{name} order {order:.3} (max residual {:.2e}, worst per-time {:.3})",
                k.max_residual,
                k.min_order_per_time.unwrap_or(f64::NAN)
            ),
        );
    }
    t.finish()
}

fn sample_field(g: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> RealField {
    RealField::from_fn(g, Layout::Vector, |x, c| f(x)[c])
}

fn max_diff(a: &RealField, b: &RealField) -> f64 {
    a.data().iter().zip(b.data()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn solver_correctness(suite: &mut Suite) -> Check {
    let mut t = Tally::default();

    // Taylor-Green energy: the n=64 run recorded by the inequality suite.
    match suite.recorded.iter().find(|(n, _)| n == "taylor_green_64") {
        Some((_, s)) => {
            let drift = (s.energy[s.len() - 1] - 0.125).abs() / 0.125;
            t.check(drift <= 1e-6, format!("TG n=64 energy drift {drift:.2e}"));
        }
        None => t.check(false, "TG n=64 run unavailable".into()),
    }

    let (a, b, c) = (1.0, 1.0, 1.0);
    let g = grid(32);
    let abc_exact = sample_field(g, |x| {
        [a * x[2].sin() + c * x[1].cos(), b * x[0].sin() + a * x[2].cos(), c * x[1].sin() + b * x[0].cos()]
    });
    let u0 = make_initial(&InitialCondition::Abc { a, b, c }, g).map_err(|e| e.to_string())?;
    let mut solver = Solver::new(SolverState::new(u0), StepControl::Fixed(0.01)).map_err(|e| e.to_string())?;
    let mut drift = 0.0f64;
    for _ in 0..100 {
        solver.step(0.01).map_err(|e| e.to_string())?;
        drift = drift.max(max_diff(&inverse(&solver.state.u_hat), &abc_exact) / abc_exact.max_abs());
    }
    t.check(drift <= 1e-8, format!("ABC n=32 drift {drift:.2e} over 100 steps"));

    let shear = InitialCondition::Shear { sin: vec![1.0, 0.5], cos: vec![0.0, 0.25] };
    let s0 = SolverState::new(make_initial(&shear, grid(32)).map_err(|e| e.to_string())?);
    let mut s = s0.clone();
    for _ in 0..50 {
        s = step(&s, 0.05).map_err(|e| e.to_string())?;
    }
    t.check(s.u_hat == s0.u_hat, "shear bitwise steady over 50 steps".into());

    // Successive step halvings at a fixed end time.
    let u = make_initial(&InitialCondition::TaylorGreen { amplitude: 1.0 }, grid(32)).map_err(|e| e.to_string())?;
    let t_end = 0.4;
    let finals: Vec<SpectralField> = [4usize, 8, 16, 32]
        .iter()
        .map(|&steps| {
            let dt = t_end / steps as f64;
            let mut s = SolverState::new(u.clone());
            for _ in 0..steps {
                s = step(&s, dt)?;
            }
            Ok(s.u_hat)
        })
        .collect::<eulerdiag::Result<_>>()
        .map_err(|e| e.to_string())?;
    let diff = |a: &SpectralField, b: &SpectralField| {
        a.data().iter().zip(b.data()).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
    };
    let d: Vec<f64> = finals.windows(2).map(|w| diff(&w[0], &w[1])).collect();
    let orders: Vec<f64> = d.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    t.check(
        orders.iter().all(|o| *o >= 3.8),
        format!("RK4 temporal orders {orders:.3?}"),
    );
    t.finish()
}

fn tg_pressure(x: [f64; 3]) -> f64 {
    ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) * ((2.0 * x[2]).cos() - 2.0) / 16.0
}

/// Largest gap between centred differences of the closed-form pressure and
/// the spectral Hessian.
fn fd_hessian_gap(n: usize) -> Result<f64, String> {
    let g = grid(n);
    let u = make_initial(&InitialCondition::TaylorGreen { amplitude: 1.0 }, g).map_err(|e| e.to_string())?;
    let pack = pressure_pack(&u).map_err(|e| e.to_string())?;
    let h = g.h();
    let mut gap = 0.0f64;
    for idx in 0..g.points() {
        let x = g.coords(idx);
        let at = |da: [f64; 3]| tg_pressure([x[0] + da[0] * h, x[1] + da[1] * h, x[2] + da[2] * h]);
        let spec = pack.hess.tensor_at(idx);
        for a in 0..3 {
            for b in a..3 {
                let e = |i: usize, s: f64| {
                    let mut v = [0.0; 3];
                    v[i] = s;
                    v
                };
                let fd = if a == b {
                    (at(e(a, 1.0)) - 2.0 * at([0.0; 3]) + at(e(a, -1.0))) / (h * h)
                } else {
                    let mut s = 0.0;
                    for (da, db, sg) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                        let mut v = [0.0; 3];
                        v[a] = da;
                        v[b] = db;
                        s += sg * at(v);
                    }
                    s / (4.0 * h * h)
                };
                gap = gap.max((fd - spec[a][b]).abs());
            }
        }
    }
    Ok(gap)
}

fn pressure_hessian(_: &mut Suite) -> Check {
    let mut t = Tally::default();
    let fields = [
        ("taylor_green n=64", InitialCondition::TaylorGreen { amplitude: 1.0 }, 64),
        ("abc n=32", InitialCondition::Abc { a: 1.0, b: 0.7, c: 0.4 }, 32),
        (
            "random n=32",
            InitialCondition::RandomSolenoidal { amplitude: 1.0, slope: 5.0 / 3.0, k_max: None, seed: 11 },
            32,
        ),
    ];
    let mut worst = 0.0f64;
    for (_, ic, n) in &fields {
        let u = make_initial(ic, grid(*n)).map_err(|e| e.to_string())?;
        worst = worst.max(pressure_pack(&u).map_err(|e| e.to_string())?.path_discrepancy);
    }
    t.check(worst <= 1e-12, format!("Hessian routes differ by at most {worst:.1e} (relative)"));

    // Beltrami flows have p = -|u|^2/2 up to a constant.
    let (a, b, c) = (1.0, 0.7, 0.4);
    let g = grid(32);
    let u = make_initial(&InitialCondition::Abc { a, b, c }, g).map_err(|e| e.to_string())?;
    let pack = pressure_pack(&u).map_err(|e| e.to_string())?;
    let mut err = 0.0f64;
    for idx in 0..g.points() {
        let x = g.coords(idx);
        let (sx, cx, sy, cy, sz, cz) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos(), x[2].sin(), x[2].cos());
        let xx = a * b * sx * cz + b * c * sy * cx;
        let yy = a * c * sz * cy + b * c * sy * cx;
        let zz = a * c * sz * cy + a * b * sx * cz;
        let (xy, xz, yz) = (b * c * cy * sx, a * b * cx * sz, a * c * cz * sy);
        let exact = [[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]];
        let h = pack.hess.tensor_at(idx);
        for i in 0..3 {
            for j in 0..3 {
                err = err.max((h[i][j] - exact[i][j]).abs());
            }
        }
    }
    t.check(err <= 1e-10, format!("ABC analytic Hessian error {err:.1e}"));

    let gaps = [32, 64, 128].map(fd_hessian_gap);
    let gaps: Vec<f64> = gaps.into_iter().collect::<Result<_, _>>()?;
    let orders: Vec<f64> = gaps.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    t.check(
        orders.iter().all(|o| *o >= 1.9),
        format!("finite-difference orders {orders:.3?} for n = 32, 64, 128"),
    );
    t.finish()
}

fn nonneg_trace(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut t = vec![0.0];
    for _ in 1..n {
        t.push(t[t.len() - 1] + 0.005 + 0.02 * rng.random::<f64>());
    }
    let g = (0..n).map(|_| 4.0 * rng.random::<f64>()).collect();
    (t, g)
}

fn monotonicity(_: &mut Suite) -> Check {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let eps = 1e-12;
    let values = |t: &[f64], g: &[f64]| -> [f64; 5] {
        let n = nested_functional(t, g).unwrap();
        [
            n.direct.value,
            n.reduced.value,
            exp_criterion(t, g).unwrap().value,
            bkm_integral(t, g).unwrap().value,
            type_one_sup(t, g, t[t.len() - 1] + 0.1, 0.1).sup,
        ]
    };
    let le = |a: [f64; 5], b: [f64; 5]| a.iter().zip(&b).all(|(x, y)| *x <= y + eps * y.abs().max(1.0));

    let mut bad = 0;
    for _ in 0..200 {
        let len = 20 + (rng.random::<f64>() * 200.0) as usize;
        let (ts, g) = nonneg_trace(&mut rng, len);
        let bigger: Vec<f64> = g.iter().map(|v| v + rng.random::<f64>()).collect();
        if !le(values(&ts, &g), values(&ts, &bigger)) {
            bad += 1;
        }
    }
    t.check(bad == 0, format!("pointwise g: {bad}/200 cases out of order"));

    let mut bad = 0;
    for _ in 0..200 {
        let len = 50 + (rng.random::<f64>() * 200.0) as usize;
        let (ts, g) = nonneg_trace(&mut rng, len);
        let end = ts[ts.len() - 1];
        let (f1, f2) = (0.1 + 0.9 * rng.random::<f64>(), 0.1 + 0.9 * rng.random::<f64>());
        let (short, long) = (f1.min(f2) * end, f1.max(f2) * end);
        let (a, b) = (window(&ts, &g, 0.0, short).unwrap(), window(&ts, &g, 0.0, long).unwrap());
        // type-one tail moves with the window end, so only the integrals are compared.
        let (va, vb) = (values(&a.0, &a.1), values(&b.0, &b.1));
        if !le([va[0], va[1], va[2], va[3], 0.0], [vb[0], vb[1], vb[2], vb[3], 0.0]) {
            bad += 1;
        }
    }
    t.check(bad == 0, format!("window: {bad}/200 cases out of order"));

    let mut bad = 0;
    let mut cases = 0;
    let g = grid(8);
    while cases < 100 {
        let center = [0, 1, 2].map(|_| std::f64::consts::TAU * rng.random::<f64>());
        let r_small = 0.8 + 0.7 * rng.random::<f64>();
        let dx = 0.6 * rng.random::<f64>() - 0.3;
        let r_big = (r_small + dx.abs() + 1.5 * rng.random::<f64>()).min(3.1);
        let big = BallSpec::new(center, r_big).unwrap();
        let small = BallSpec::new([center[0] + dx, center[1], center[2]], r_small).unwrap();
        if !small.is_inside(&big) {
            continue;
        }
        let times: Vec<f64> = (0..12).map(|k| 0.05 * k as f64).collect();
        let mut gs = Vec::new();
        let mut gb = Vec::new();
        let mut empty = false;
        for _ in &times {
            let data = (0..6 * g.points()).map(|_| rng.random::<f64>() - 0.5).collect();
            let f = RealField::from_vec(g, Layout::SymTensor, data).unwrap();
            match (sup_norm(&f, Some(&small)), sup_norm(&f, Some(&big))) {
                (Ok(s), Ok(b)) => {
                    gs.push(s);
                    gb.push(b);
                }
                _ => empty = true,
            }
        }
        if empty {
            continue;
        }
        cases += 1;
        if !le(values(&times, &gs), values(&times, &gb)) {
            bad += 1;
        }
    }
    t.check(bad == 0, format!("ball: {bad}/{cases} nested-ball cases out of order"));
    t.finish()
}

fn determinism(suite: &mut Suite) -> Check {
    let mut t = Tally::default();
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = root.path().join("run");
    let body = "grid.n = 16\ntime.cfl = 0.5\ntime.t_end = 0.3\nic.kind = random_solenoidal\nseed = 42\n\
                particles.m = 3\nparticles.seed_max_vorticity = true\ncheckpoint.interval = 2\n\
                ball.center = 3, 3, 3\nball.radius = 1.2\n";
    let mut manifests = Vec::new();
    let mut tables = Vec::new();
    for _ in 0..2 {
        let _ = fs::remove_dir_all(&dir);
        let (out, series) = simulate(&dir, body)?;
        let res = cmd_particles(&out.dir).map_err(|e| e.to_string())?;
        let bytes: Vec<Vec<u8>> = res.files.iter().map(|f| fs::read(f).unwrap()).collect();
        manifests.push(out.manifest.files);
        tables.push(bytes);
        if suite.recorded.iter().all(|(n, _)| n != "random_16") {
            suite.recorded.push(("random_16".into(), series));
        }
    }
    t.check(
        manifests[0] == manifests[1],
        format!("{} output checksums identical across runs", manifests[0].len()),
    );
    t.check(tables[0] == tables[1], "residual tables identical across replays".into());
    t.finish()
}

fn main() -> ExitCode {
    let mut suite = Suite {
        results: Vec::new(),
        recorded: Vec::new(),
    };
    suite.run(1, "synthetic sharpness", synthetic_sharpness);
    suite.run(3, "theorem-backed inequalities (Taylor-Green n=64)", inequality_suite);
    suite.run(4, "Lagrangian identity convergence", lagrangian_identities);
    suite.run(5, "solver correctness", solver_correctness);
    suite.run(6, "pressure Hessian correctness", pressure_hessian);
    suite.run(7, "criterion monotonicity", monotonicity);
    suite.run(8, "determinism", determinism);
    suite.run(2, "dual-path nested functional", dual_path);

    suite.results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (id, name, out, secs) in &suite.results {
        match out {
            Ok(detail) => println!("PASS [{id}] {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{id}] {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", suite.results.len() - failed, suite.results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
