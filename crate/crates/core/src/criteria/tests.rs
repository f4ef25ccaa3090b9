use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::pressure::{sup_norm, BallSpec};
use crate::spectral::{GridSpec, Layout, RealField};

fn uniform(n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn synthetic_half_converges_to_closed_form() {
    let r = synthetic_profile(0.5, 0.0, 1.0, 1e-2, SyntheticOptions::default()).unwrap();
    assert_eq!(r.bound_limit, Some(2.0));
    let lim = r.final_bound_limit.unwrap();
    assert!((lim.value - 2.0).abs() <= 1e-6, "{lim:?}");
    assert_eq!(r.chain_dominated, Some(true));
    assert!(!r.growth.diverges);
    assert!((r.growth.measured_exponent - 0.5).abs() < 0.02);
    // The nested functional itself stays below the bound.
    let f = r.nested_limit.unwrap();
    assert!(f.value > 0.0 && f.value < 2.0, "{f:?}");
}

#[test]
fn synthetic_final_line_matches_antiderivative() {
    // ∫_0^{1−ε} (1−t)^{−η} dt = (1 − ε^{1−η})/(1−η).
    let eta = 0.3;
    let r = synthetic_profile(
        eta,
        0.0,
        1.0,
        1e-2,
        SyntheticOptions {
            halvings: 3,
            nodes_per_efold: 1000,
        },
    )
    .unwrap();
    for c in &r.cuts {
        let exact = (1.0 - c.eps_cut.powf(1.0 - eta)) / (1.0 - eta);
        let line = c.chain.unwrap().final_bound;
        assert!((line.value - exact).abs() <= line.error.max(1e-9), "{line:?} {exact}");
    }
}

#[test]
fn synthetic_log_growth_at_one() {
    let r = synthetic_profile(1.0, 0.0, 1.0, 1e-2, SyntheticOptions::default()).unwrap();
    assert!(r.growth.diverges);
    assert!(r.growth.measured_exponent.abs() < 0.02, "{:?}", r.growth);
    let expected = 1.0 / std::f64::consts::E;
    assert!((r.growth.log_coefficient - expected).abs() < 1e-2 * expected, "{:?}", r.growth);
    assert!(r.bound_limit.is_none());
}

#[test]
fn synthetic_power_growth_above_one() {
    let r = synthetic_profile(1.2, 0.0, 1.0, 1e-2, SyntheticOptions::default()).unwrap();
    assert!(r.growth.diverges);
    assert!((r.growth.measured_exponent + 0.2).abs() < 0.02, "{:?}", r.growth);
    let last = *r.growth.value_ratios.last().unwrap();
    assert!((last - 2f64.powf(0.2)).abs() < 0.02, "{last}");
}

#[test]
fn type_one_cases() {
    let t = uniform(11, 0.0, 0.9);
    let zero = type_one_sup(&t, &[0.0; 11], 1.0, 0.1);
    assert_eq!((zero.sup, zero.tail_sup), (0.0, 0.0));
    let g: Vec<f64> = t.iter().map(|s| 1.0 / ((1.0 - s) * (1.0 - s))).collect();
    let r = type_one_sup(&t, &g, 1.0, 0.1);
    assert!((r.sup - 1.0).abs() < 1e-14 && (r.tail_sup - 1.0).abs() < 1e-14);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g: Vec<f64> = (0..11).map(|_| rng.random::<f64>()).collect();
    let r = type_one_sup(&t, &g, 1.2, 0.3);
    let brute = t
        .iter()
        .zip(&g)
        .map(|(s, v)| (1.2 - s) * (1.2 - s) * v)
        .fold(0.0, f64::max);
    let tail = t
        .iter()
        .zip(&g)
        .filter(|(s, _)| **s >= 0.9 - 0.3 * 0.9)
        .map(|(s, v)| (1.2 - s) * (1.2 - s) * v)
        .fold(0.0, f64::max);
    assert_eq!(r.sup, brute);
    assert_eq!(r.tail_sup, tail);
}

#[test]
fn exp_criterion_cases() {
    let t = uniform(21, 0.0, 2.5);
    let z = exp_criterion(&t, &[0.0; 21]).unwrap();
    assert!((z.value - 2.5).abs() < 1e-14 && z.error < 1e-14);
    let t = uniform(8001, 0.0, 1.0);
    let one = exp_criterion(&t, &vec![1.0; t.len()]).unwrap();
    let truth = std::f64::consts::E - 1.0;
    assert!((one.value - truth).abs() < 1e-8, "{}", one.value - truth);
    assert!((one.value - truth).abs() <= one.error);
}

#[test]
fn bkm_cases() {
    let t = uniform(9, 0.0, 1.0);
    assert_eq!(bkm_integral(&t, &[0.0; 9]).unwrap().value, 0.0);
    let c = 3f64.sqrt();
    let steady = bkm_integral(&t, &[c; 9]).unwrap();
    assert!((steady.value - c).abs() < 1e-14);
    let t = uniform(257, 0.0, 1.0);
    let w: Vec<f64> = t.iter().map(|s| 1.0 + (3.0 * s).sin().powi(2)).collect();
    let order = observed_order(&t, &w, trapezoid).unwrap();
    assert!(order >= 1.9, "{order}");
}

#[test]
fn keyforma_trivial_flows() {
    let t = uniform(11, 0.0, 2.0);
    // Shear: constant vorticity, no pressure, no stretching.
    let k = keyforma_check(&t, &[1.5; 11], &[0.0; 11], 1.5, 0.0).unwrap();
    assert_eq!(k.bracket.reduced.value, 0.0);
    assert!((k.lhs.value - 3.0).abs() < 1e-14);
    assert!((k.rhs.value - 3.0).abs() < 1e-14);
    assert!(k.margin >= -1e-14 && k.holds);
    let z = keyforma_check(&t, &[0.0; 11], &[0.0; 11], 0.0, 0.0).unwrap();
    assert_eq!((z.lhs.value, z.rhs.value), (0.0, 0.0));
    assert!(keyforma_check(&t, &[], &[0.0; 11], 0.0, 0.0).is_err());
}

fn series_from(t: Vec<f64>, f: impl Fn(f64) -> [f64; 5], balls: usize) -> NormSeries {
    let mut s = NormSeries::with_balls(
        &vec![([1.0, 2.0, 3.0], 1.0); balls],
        SeriesMeta {
            grid_n: Some(32),
            sampling: Some("fourier".into()),
            omega0_sup: None,
            stretch0_sup: None,
        },
    );
    for &ti in &t {
        let [h, w, g, m, e] = f(ti);
        s.push(&NormSample {
            t: ti,
            hess: h,
            vort: w,
            gradu: g,
            mu: m,
            energy: e,
            balls: vec![[h, w, 0.5]; balls],
        })
        .unwrap();
    }
    s
}

#[test]
fn zero_series_report() {
    let s = series_from(uniform(17, 0.0, 1.5), |_| [0.0; 5], 1);
    let r = global_report(&s, &ReportOptions::default()).unwrap();
    assert_eq!(r.f_nested.direct.value, 0.0);
    assert_eq!(r.type_one.sup, 0.0);
    assert_eq!(r.bkm.value, 0.0);
    assert!((r.exp_hess.value - 1.5).abs() < 1e-14);
    assert!((r.exp_mu.unwrap().value - 1.5).abs() < 1e-14);
    assert!(r.violations.is_empty());
    let l = local_report(&s, 0, &ReportOptions::default()).unwrap();
    assert!((l.u_ball_integral.unwrap().value - 0.75).abs() < 1e-14);
    assert!(local_report(&s, 1, &ReportOptions::default()).is_err());
}

#[test]
fn whole_box_ball_matches_global() {
    let s = series_from(
        uniform(41, 0.0, 0.8),
        |t| [1.0 + t, 2.0 + t * t, 3.0, 0.5, 1.0],
        1,
    );
    let opts = ReportOptions {
        window: Some((0.1, 0.7)),
        t_ref: Some(0.9),
        ..ReportOptions::default()
    };
    let g = global_report(&s, &opts).unwrap();
    let l = local_report(&s, 0, &opts).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
    assert!(close(g.f_nested.direct.value, l.f_nested.direct.value));
    assert!(close(g.f_nested.reduced.value, l.f_nested.reduced.value));
    assert!(close(g.type_one.sup, l.type_one.sup));
    assert!(close(g.bkm.value, l.bkm.value));
    assert!(close(g.exp_hess.value, l.exp_hess.value));
    assert!(g.violations.is_empty(), "{:?}", g.violations);
}

#[test]
fn window_outside_series_rejected() {
    let s = series_from(uniform(5, 0.0, 1.0), |_| [1.0; 5], 0);
    let opts = ReportOptions {
        window: Some((0.5, 1.5)),
        ..ReportOptions::default()
    };
    assert!(global_report(&s, &opts).is_err());
    let opts = ReportOptions {
        t_ref: Some(0.5),
        ..ReportOptions::default()
    };
    assert!(global_report(&s, &opts).is_err());
}

/// Random nonnegative trace on a random nonuniform time grid.
fn random_trace(seed: u64, n: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = vec![0.0];
    for _ in 1..n {
        let last = *t.last().unwrap();
        t.push(last + 0.5 / n as f64 + rng.random::<f64>() / n as f64);
    }
    // Smooth positive profile with a random bump plus sample noise.
    let (a, c, w) = (rng.random::<f64>(), rng.random::<f64>(), 1.0 + 4.0 * rng.random::<f64>());
    let g = t
        .iter()
        .map(|s| scale * (a + (w * s + c).sin().powi(2) + 0.05 * rng.random::<f64>()))
        .collect();
    (t, g)
}

#[test]
fn dual_path_on_random_traces() {
    for seed in 0..100 {
        let (t, g) = random_trace(seed, 200 + (seed as usize % 7) * 37, 1.0 + seed as f64 / 20.0);
        let r = nested_functional(&t, &g).unwrap();
        assert!(r.agree, "seed {seed}: {r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn functionals_monotone_in_g(seed in 0u64..10_000, bump in 0.0f64..2.0) {
        let (t, g) = random_trace(seed, 120, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let big: Vec<f64> = g.iter().map(|v| v + bump * rng.random::<f64>()).collect();
        let (lo, hi) = (nested_functional(&t, &g).unwrap(), nested_functional(&t, &big).unwrap());
        prop_assert!(lo.direct.value <= hi.direct.value);
        prop_assert!(lo.reduced.value <= hi.reduced.value);
        prop_assert!(exp_criterion(&t, &g).unwrap().value <= exp_criterion(&t, &big).unwrap().value);
        prop_assert!(bkm_integral(&t, &g).unwrap().value <= bkm_integral(&t, &big).unwrap().value);
        let t_ref = t[t.len() - 1];
        prop_assert!(type_one_sup(&t, &g, t_ref, 0.1).sup <= type_one_sup(&t, &big, t_ref, 0.1).sup);
    }

    #[test]
    fn functionals_monotone_in_window(seed in 0u64..10_000, f1 in 0.05f64..0.95, f2 in 0.05f64..0.95) {
        let (t, g) = random_trace(seed, 150, 1.5);
        let (a, end) = (t[0], t[t.len() - 1]);
        let (short, long) = (f1.min(f2), f1.max(f2));
        let b1 = a + short * (end - a);
        let b2 = a + long * (end - a);
        let (ts, gs) = window(&t, &g, a, b1).unwrap();
        let (tl, gl) = window(&t, &g, a, b2).unwrap();
        let eps = 1e-12;
        let n = |t: &[f64], g: &[f64]| nested_functional(t, g).unwrap();
        prop_assert!(n(&ts, &gs).direct.value <= n(&tl, &gl).direct.value + eps);
        prop_assert!(n(&ts, &gs).reduced.value <= n(&tl, &gl).reduced.value + eps);
        prop_assert!(exp_criterion(&ts, &gs).unwrap().value <= exp_criterion(&tl, &gl).unwrap().value + eps);
        prop_assert!(bkm_integral(&ts, &gs).unwrap().value <= bkm_integral(&tl, &gl).unwrap().value + eps);
    }

    #[test]
    fn functionals_monotone_in_ball(
        seed in 0u64..10_000,
        cx in 0.0f64..std::f64::consts::TAU, cy in 0.0f64..std::f64::consts::TAU, cz in 0.0f64..std::f64::consts::TAU,
        r_small in 0.8f64..1.5, extra in 0.0f64..1.5,
        dx in -0.3f64..0.3,
    ) {
        let grid = GridSpec::new(8).unwrap();
        let big = BallSpec::new([cx, cy, cz], r_small + extra + dx.abs()).unwrap();
        let small = BallSpec::new([cx + dx, cy, cz], r_small).unwrap();
        prop_assume!(small.is_inside(&big));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let times = uniform(12, 0.0, 0.6);
        let mut g_small = Vec::new();
        let mut g_big = Vec::new();
        for _ in &times {
            let data = (0..6 * grid.points()).map(|_| rng.random::<f64>() - 0.5).collect();
            let f = RealField::from_vec(grid, Layout::SymTensor, data).unwrap();
            let (s, b) = match (sup_norm(&f, Some(&small)), sup_norm(&f, Some(&big))) {
                (Ok(s), Ok(b)) => (s, b),
                _ => return Ok(()),
            };
            g_small.push(s);
            g_big.push(b);
        }
        let ns = nested_functional(&times, &g_small).unwrap();
        let nb = nested_functional(&times, &g_big).unwrap();
        prop_assert!(ns.direct.value <= nb.direct.value);
        prop_assert!(ns.reduced.value <= nb.reduced.value);
        prop_assert!(exp_criterion(&times, &g_small).unwrap().value <= exp_criterion(&times, &g_big).unwrap().value);
        prop_assert!(bkm_integral(&times, &g_small).unwrap().value <= bkm_integral(&times, &g_big).unwrap().value);
        prop_assert!(type_one_sup(&times, &g_small, 0.6, 0.1).sup <= type_one_sup(&times, &g_big, 0.6, 0.1).sup);
    }
}
