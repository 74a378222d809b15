#![allow(clippy::too_many_arguments)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::boundary::RobinMeasure;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::rng::PathStreams;
use crate::sampler::{Family, Level, NoiseStream, PathState, SimConfig, Walker};

use super::{check_common, check_time, per_path, Estimate, EstimatorKind, TestFunction};

/// Turns a path stopped at time `t` into one sample of `P_t f(x)`.
pub trait SemigroupEstimator: Send + Sync {
    fn kind(&self) -> EstimatorKind;

    fn contribution(&self, state: &PathState, f: &dyn TestFunction, clock: &mut ChaCha8Rng) -> f64;
}

/// `f(X_t) exp(-A_t)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct WeightEstimator;

impl SemigroupEstimator for WeightEstimator {
    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Weight
    }

    fn contribution(
        &self,
        state: &PathState,
        f: &dyn TestFunction,
        _clock: &mut ChaCha8Rng,
    ) -> f64 {
        if state.alive {
            f.eval(state.position) * (-state.functional).exp()
        } else {
            0.0
        }
    }
}

/// `f(X_t) 1{A_t < Z}` with an independent `Z ~ Exp(1)`: the path is killed
/// once its functional passes the clock.
#[derive(Debug, Clone, Copy, Default)]
pub struct KilledEstimator;

impl SemigroupEstimator for KilledEstimator {
    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Killed
    }

    fn contribution(&self, state: &PathState, f: &dyn TestFunction, clock: &mut ChaCha8Rng) -> f64 {
        let z: f64 = clock.sample(Exp1);
        if state.alive && state.functional < z {
            f.eval(state.position)
        } else {
            0.0
        }
    }
}

/// `f(X_t) 1{path never touched the boundary}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirichletEstimator;

impl SemigroupEstimator for DirichletEstimator {
    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Dirichlet
    }

    fn contribution(
        &self,
        state: &PathState,
        f: &dyn TestFunction,
        _clock: &mut ChaCha8Rng,
    ) -> f64 {
        if state.alive && !state.touched {
            f.eval(state.position)
        } else {
            0.0
        }
    }
}

struct EstimatorEntry {
    name: &'static str,
    build: fn() -> Box<dyn SemigroupEstimator>,
}

const ESTIMATORS: &[EstimatorEntry] = &[
    EstimatorEntry {
        name: "weight",
        build: || Box::new(WeightEstimator),
    },
    EstimatorEntry {
        name: "killed",
        build: || Box::new(KilledEstimator),
    },
    EstimatorEntry {
        name: "dirichlet",
        build: || Box::new(DirichletEstimator),
    },
];

pub fn estimator_names() -> Vec<&'static str> {
    ESTIMATORS.iter().map(|e| e.name).collect()
}

pub fn estimator(name: &str) -> Result<Box<dyn SemigroupEstimator>> {
    ESTIMATORS
        .iter()
        .find(|e| e.name == name)
        .map(|e| (e.build)())
        .ok_or_else(|| Error::UnknownName {
            kind: "estimator",
            name: name.into(),
            available: estimator_names().join(", "),
        })
}

/// Per-path contributions of `est` at `level`.
pub fn semigroup_samples(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    t: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    est: &dyn SemigroupEstimator,
    level: Level,
) -> Result<Vec<f64>> {
    check_common(domain, x, n, cfg)?;
    check_time(t, cfg)?;
    let scheme = cfg.scheme.build()?;
    let steps = level.steps_for(t);
    Ok(per_path(n, |i| {
        let streams = PathStreams::new(cfg.seed, i);
        let mut clock = streams.clock;
        let mut fam = Family::new(
            domain,
            &[measure],
            scheme.as_ref(),
            level,
            cfg.bridge_correction,
            x,
            streams.brownian,
            streams.bridge,
        );
        for _ in 0..steps {
            if !fam.step() {
                break;
            }
        }
        est.contribution(fam.state(0), f, &mut clock)
    }))
}

pub fn semigroup(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    t: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    est: &dyn SemigroupEstimator,
) -> Result<Estimate> {
    let samples = semigroup_samples(domain, measure, f, t, x, n, cfg, est, cfg.level())?;
    Ok(Estimate::from_samples(&samples, cfg.clone(), est.kind()))
}

/// `P_t f(x) = E_x[f(X_t) exp(-A_t)]`.
pub fn semigroup_weight(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    t: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
) -> Result<Estimate> {
    semigroup(domain, measure, f, t, x, n, cfg, &WeightEstimator)
}

/// `P_t f(x) = E_x[f(X_t); A_t < Z]`.
pub fn semigroup_killed(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    t: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
) -> Result<Estimate> {
    semigroup(domain, measure, f, t, x, n, cfg, &KilledEstimator)
}

/// Contributions of `est` at the step sizes `cfg.h * factors[j]`, all driven
/// by one pass over the fine Brownian stream, indexed `[level][path]`. Each
/// level keeps its own copies of the bridge and clock streams, so column `j`
/// equals a separate run at `cfg.level().coarsened(factors[j])` (bit for bit
/// when the factors are powers of two).
pub fn semigroup_levels(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    t: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    est: &dyn SemigroupEstimator,
    factors: &[u32],
) -> Result<Vec<Vec<f64>>> {
    check_common(domain, x, n, cfg)?;
    check_time(t, cfg)?;
    if factors.is_empty() || factors.contains(&0) {
        return Err(Error::InvalidArgument(
            "level factors must be positive".into(),
        ));
    }
    let scheme = cfg.scheme.build()?;
    let fine = cfg.level();
    let levels: Vec<Level> = factors.iter().map(|&k| fine.coarsened(k)).collect();
    let steps: Vec<u64> = levels.iter().map(|l| l.steps_for(t)).collect();
    let fine_steps = steps
        .iter()
        .zip(factors)
        .map(|(&s, &k)| s * u64::from(k))
        .max()
        .unwrap_or(0);
    let ncomp = domain.num_components();
    let rows = per_path(n, |i| {
        let streams = PathStreams::new(cfg.seed, i);
        let mut noise = NoiseStream::new(streams.brownian, fine, domain.dim());
        let mut walkers: Vec<Walker> = levels
            .iter()
            .map(|l| {
                Walker::new(
                    domain,
                    measure,
                    scheme.as_ref(),
                    l.h,
                    cfg.bridge_correction,
                    x,
                )
            })
            .collect();
        let mut bridges = vec![streams.bridge; levels.len()];
        let mut acc = vec![Point::ZERO; levels.len()];
        let mut taken = vec![0u64; levels.len()];
        let mut u = vec![0.0; ncomp];
        for k in 1..=fine_steps {
            let dw = noise.next_increment();
            for j in 0..levels.len() {
                acc[j] += dw;
                if k % u64::from(factors[j]) != 0 || taken[j] == steps[j] {
                    continue;
                }
                let uniforms: &[f64] = if cfg.bridge_correction {
                    for v in u.iter_mut() {
                        *v = bridges[j].random();
                    }
                    &u
                } else {
                    &[]
                };
                walkers[j].advance(acc[j], uniforms);
                acc[j] = Point::ZERO;
                taken[j] += 1;
            }
            if walkers.iter().all(|w| !w.state.alive) {
                break;
            }
        }
        walkers
            .iter()
            .map(|w| est.contribution(&w.state, f, &mut streams.clock.clone()))
            .collect::<Vec<_>>()
    });
    Ok(transpose(rows, levels.len()))
}

/// Weight contributions `f(X_t) exp(-A_t)` for several measures driven by the
/// same noise, indexed `[measure][path]`.
pub fn coupled_semigroup(
    domain: &Domain,
    measures: &[RobinMeasure],
    f: &dyn TestFunction,
    t: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    level: Level,
) -> Result<Vec<Vec<f64>>> {
    check_common(domain, x, n, cfg)?;
    check_time(t, cfg)?;
    let scheme = cfg.scheme.build()?;
    let steps = level.steps_for(t);
    let refs: Vec<&RobinMeasure> = measures.iter().collect();
    let rows = per_path(n, |i| {
        let streams = PathStreams::new(cfg.seed, i);
        let mut fam = Family::new(
            domain,
            &refs,
            scheme.as_ref(),
            level,
            cfg.bridge_correction,
            x,
            streams.brownian,
            streams.bridge,
        );
        for _ in 0..steps {
            if !fam.step() {
                break;
            }
        }
        fam.walkers
            .iter()
            .map(|w| f.eval(w.state.position) * w.state.weight())
            .collect::<Vec<_>>()
    });
    Ok(transpose(rows, measures.len()))
}

pub(crate) fn transpose(rows: Vec<Vec<f64>>, width: usize) -> Vec<Vec<f64>> {
    let mut cols = vec![Vec::with_capacity(rows.len()); width];
    for row in rows {
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(v);
        }
    }
    cols
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Constant;

    #[test]
    fn neumann_weight_is_exactly_one() {
        for d in [
            Domain::unit_interval(),
            Domain::unit_square(),
            Domain::unit_disk(),
        ] {
            let m = RobinMeasure::neumann(&d);
            let cfg = SimConfig::new(1e-2, 0.5, 1);
            let e = semigroup_weight(&d, &m, &Constant(1.0), 0.5, d.center(), 200, &cfg).unwrap();
            assert_eq!(e.mean, 1.0);
            assert_eq!(e.std_error, 0.0);
            let e = semigroup_killed(&d, &m, &Constant(1.0), 0.5, d.center(), 200, &cfg).unwrap();
            assert_eq!(e.mean, 1.0);
        }
    }

    #[test]
    fn argument_errors() {
        let d = Domain::unit_interval();
        let m = RobinMeasure::neumann(&d);
        let cfg = SimConfig::new(1e-2, 0.5, 1);
        let one = Constant(1.0);
        assert!(semigroup_weight(&d, &m, &one, 0.5, d.center(), 1, &cfg).is_err());
        assert!(semigroup_weight(&d, &m, &one, 0.6, d.center(), 10, &cfg).is_err());
        assert!(semigroup_weight(&d, &m, &one, 0.5, Point::on_line(1.5), 10, &cfg).is_err());
        assert!(estimator("antithetic").is_err());
        assert_eq!(estimator("killed").unwrap().kind(), EstimatorKind::Killed);
    }

    #[test]
    fn replay_is_bit_identical() {
        let d = Domain::unit_square();
        let m = RobinMeasure::constant(&d, 1.0).unwrap();
        let cfg = SimConfig::new(1e-3, 0.1, 42);
        let one = Constant(1.0);
        let a = semigroup_weight(&d, &m, &one, 0.1, Point::new(0.2, 0.7), 300, &cfg).unwrap();
        let b = semigroup_weight(&d, &m, &one, 0.1, Point::new(0.2, 0.7), 300, &cfg).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let c = pool
            .install(|| semigroup_weight(&d, &m, &one, 0.1, Point::new(0.2, 0.7), 300, &cfg))
            .unwrap();
        assert_eq!(a.mean.to_bits(), c.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), c.std_error.to_bits());
    }

    #[test]
    fn sub_markov_bound_per_path() {
        let d = Domain::unit_interval();
        let m = RobinMeasure::constant(&d, 2.0).unwrap();
        let cfg = SimConfig::new(1e-3, 0.3, 9);
        let f = Constant(0.7);
        for name in estimator_names() {
            let est = estimator(name).unwrap();
            let s = semigroup_samples(
                &d,
                &m,
                &f,
                0.3,
                Point::on_line(0.1),
                500,
                &cfg,
                est.as_ref(),
                cfg.level(),
            )
            .unwrap();
            assert!(s.iter().all(|&v| (0.0..=0.7).contains(&v)), "{name}");
        }
    }

    #[test]
    fn one_pass_levels_equal_separate_runs() {
        let d = Domain::unit_square();
        let cases = [
            (RobinMeasure::constant(&d, 1.5).unwrap(), false, "killed"),
            (RobinMeasure::dirichlet(&d), true, "weight"),
        ];
        for (m, bridge, name) in cases {
            let cfg = SimConfig::new(1e-3, 0.1, 17).with_bridge(bridge);
            let est = estimator(name).unwrap();
            let x = Point::new(0.2, 0.6);
            let f = Constant(1.0);
            let cols =
                semigroup_levels(&d, &m, &f, 0.1, x, 300, &cfg, est.as_ref(), &[1, 4, 16]).unwrap();
            for (col, k) in cols.iter().zip([1, 4, 16]) {
                let alone = semigroup_samples(
                    &d,
                    &m,
                    &f,
                    0.1,
                    x,
                    300,
                    &cfg,
                    est.as_ref(),
                    cfg.level().coarsened(k),
                )
                .unwrap();
                assert_eq!(col, &alone, "{name} factor {k}");
            }
        }
    }
}
