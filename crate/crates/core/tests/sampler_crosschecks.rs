//! Statistical cross-checks of the sampler against independent constructions.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use robin_core::boundary::RobinMeasure;
use robin_core::estimators::{mean_and_stderr, per_path};
use robin_core::geometry::{Domain, Point};
use robin_core::rng::{derived_seed, stream_rng, PathStreams, StreamKind};
use robin_core::sampler::{
    bridge_exit_probability, kill_time, simulate, Observe, SchemeConfig, SimConfig,
};

fn local_time_at(cfg: &SimConfig, t: f64, n: u64) -> Vec<f64> {
    let d = Domain::unit_interval();
    let m = RobinMeasure::neumann(&d);
    per_path(n, |i| {
        let tr = simulate(
            &d,
            &m,
            Point::on_line(0.0),
            cfg,
            PathStreams::new(cfg.seed, i),
            &Observe::Times(vec![t]),
        )
        .unwrap();
        tr.last().unwrap().ell.iter().sum()
    })
}

// From the reflecting endpoint both schemes estimate E[ell_T] = E|B_T| =
// sqrt(2T/pi) (the far end is out of reach at T = 0.1). Their biases at
// h = 1e-5, eps = 0.005 are about -0.0018 and -0.0025.
#[test]
fn occupation_and_projection_local_times_agree() {
    let (t, n) = (0.1, 20_000);
    let proj = SimConfig::new(1e-5, t, 11);
    let occ =
        SimConfig::new(1e-5, t, derived_seed(11, 1)).with_scheme(SchemeConfig::occupation(0.005));
    let (mp, sp) = mean_and_stderr(&local_time_at(&proj, t, n));
    let (mo, so) = mean_and_stderr(&local_time_at(&occ, t, n));
    let tol = 3.0 * sp.hypot(so);
    assert!(
        (mp - mo).abs() <= tol,
        "projection {mp} occupation {mo} tol {tol}"
    );
    let exact = (2.0 * t / std::f64::consts::PI).sqrt();
    assert!(
        (mp - exact).abs() < 4.0 * sp + 0.003,
        "projection {mp} vs {exact}"
    );
}

/// Whether a Brownian bridge from `a` to `b` over `[0, h]`, sampled on
/// `fine` equal substeps, goes below zero on the full grid and on every
/// fourth node.
fn bridge_hits(rng: &mut impl Rng, a: f64, b: f64, h: f64, fine: usize) -> (bool, bool) {
    let dt = h / fine as f64;
    let mut w = vec![0.0; fine + 1];
    for k in 1..=fine {
        let z: f64 = rng.sample(StandardNormal);
        w[k] = w[k - 1] + dt.sqrt() * z;
    }
    let end = w[fine];
    let (mut hit_fine, mut hit_coarse) = (false, false);
    for (k, wk) in w.iter().enumerate() {
        let s = k as f64 / fine as f64;
        let y = a + wk - s * end + s * (b - a);
        if y <= 0.0 {
            hit_fine = true;
            hit_coarse |= k % 4 == 0;
        }
    }
    (hit_fine, hit_coarse)
}

// Discrete monitoring misses crossings at a rate proportional to the square
// root of the monitoring step, so 2 p(dt) - p(4 dt) removes the leading error.
#[test]
fn bridge_exit_probability_matches_dense_monitoring() {
    let (d, h) = (0.1, 0.01);
    let fine = 400;
    let n = 200_000;
    let rows = per_path(n, |i| {
        let mut rng = stream_rng(23, i, StreamKind::Brownian);
        let (f, c) = bridge_hits(&mut rng, d, d, h, fine);
        let (f, c) = (f as u8 as f64, c as u8 as f64);
        [c, 2.0 * f - c]
    });
    let coarse: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let extrapolated: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let (pc, _) = mean_and_stderr(&coarse);
    let (pe, se) = mean_and_stderr(&extrapolated);
    let exact = bridge_exit_probability(d, d, h);
    assert!((exact - (-2.0f64).exp()).abs() < 1e-15);
    assert!(
        pc < exact,
        "monitoring every h/100 must undercount: {pc} vs {exact}"
    );
    assert!(
        (pe - exact).abs() <= 4.0 * se,
        "extrapolated {pe} se {se} vs {exact}"
    );
}

// A coarse step killed with probability exp(-2 a b / h) must agree with the
// same rule applied on a grid one hundred times finer.
#[test]
fn bridge_exit_probability_composes_over_substeps() {
    let (d, h, sub) = (0.1, 0.01, 100);
    let dt = h / sub as f64;
    let survive = per_path(100_000, |i| {
        let mut rng = stream_rng(29, i, StreamKind::Brownian);
        let mut w = vec![0.0; sub + 1];
        for k in 1..=sub {
            let z: f64 = rng.sample(StandardNormal);
            w[k] = w[k - 1] + dt.sqrt() * z;
        }
        let end = w[sub];
        let y = |k: usize| d + w[k] - (k as f64 / sub as f64) * end;
        (0..sub)
            .map(|k| {
                let (a, b) = (y(k), y(k + 1));
                if a <= 0.0 || b <= 0.0 {
                    0.0
                } else {
                    1.0 - bridge_exit_probability(a, b, dt)
                }
            })
            .product::<f64>()
    });
    let (s, se) = mean_and_stderr(&survive);
    let exact = 1.0 - bridge_exit_probability(d, d, h);
    assert!(
        (s - exact).abs() <= 4.0 * se,
        "survival {s} se {se} vs {exact}"
    );
}

#[test]
fn exponential_clock_reproduces_the_weight() {
    let d = Domain::unit_interval();
    let m = RobinMeasure::constant(&d, 1.0).unwrap();
    let cfg = SimConfig::new(1e-3, 0.25, 31);
    let rows = per_path(20_000, |i| {
        let mut streams = PathStreams::new(cfg.seed, i);
        let z: f64 = streams.clock.sample(Exp1);
        let tr = simulate(
            &d,
            &m,
            Point::on_line(0.5),
            &cfg,
            streams,
            &Observe::EveryStep,
        )
        .unwrap();
        let weight = (-tr.last().unwrap().functional).exp();
        let survived = (kill_time(&tr, z) > cfg.horizon) as u8 as f64;
        (weight, survived)
    });
    let (w, k): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let (mw, sw) = mean_and_stderr(&w);
    let (mk, sk) = mean_and_stderr(&k);
    assert!(
        (mw - mk).abs() <= 4.0 * sw.hypot(sk),
        "weight {mw} killed {mk}"
    );
}
