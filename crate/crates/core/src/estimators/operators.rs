#![allow(clippy::too_many_arguments)]

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::boundary::RobinMeasure;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::rng::PathStreams;
use crate::sampler::{Family, Level, SimConfig};

use super::semigroup::transpose;
use super::{check_alpha, check_common, per_path, Estimate, EstimatorKind, TestFunction};

/// Boundary local time accumulated per unit time by a uniformly started path,
/// per unit boundary measure.
pub const LOCAL_TIME_DENSITY: f64 = 0.5;

/// Per-path samples of `f(X_tau) exp(-A_tau) / alpha` with `tau ~ Exp(alpha)`.
pub fn resolvent_samples(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    alpha: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    level: Level,
) -> Result<Vec<f64>> {
    Ok(coupled_resolvent(
        domain,
        std::slice::from_ref(measure),
        f,
        alpha,
        x,
        n,
        cfg,
        level,
    )?
    .pop()
    .expect("one measure in, one column out"))
}

/// `R_alpha^A f(x) = E_x[int_0^inf exp(-alpha t) exp(-A_t) f(X_t) dt]`,
/// sampled at an independent exponential time so no horizon is needed.
/// With the Neumann measure this is the plain resolvent `R_alpha f`.
pub fn resolvent(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    alpha: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
) -> Result<Estimate> {
    let samples = resolvent_samples(domain, measure, f, alpha, x, n, cfg, cfg.level())?;
    Ok(Estimate::from_samples(
        &samples,
        cfg.clone(),
        EstimatorKind::Resolvent,
    ))
}

/// Resolvent samples for several measures sharing noise and exponential
/// times, indexed `[measure][path]`.
pub fn coupled_resolvent(
    domain: &Domain,
    measures: &[RobinMeasure],
    f: &dyn TestFunction,
    alpha: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    level: Level,
) -> Result<Vec<Vec<f64>>> {
    check_alpha(alpha)?;
    check_common(domain, x, n, cfg)?;
    let scheme = cfg.scheme.build()?;
    let refs: Vec<&RobinMeasure> = measures.iter().collect();
    let rows = per_path(n, |i| {
        let streams = PathStreams::new(cfg.seed, i);
        let mut clock = streams.clock;
        let tau = clock.sample::<f64, _>(Exp1) / alpha;
        let steps = level.steps_for(tau);
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
            .map(|w| f.eval(w.state.position) * w.state.weight() / alpha)
            .collect::<Vec<_>>()
    });
    Ok(transpose(rows, measures.len()))
}

/// Potential estimate together with the bound on the part of the integral
/// beyond the simulation horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialEstimate {
    pub estimate: Estimate,
    /// `sup|g| * sup(beta) * rate * exp(-alpha T) / alpha`, with `rate` the
    /// stationary local-time rate `sigma(boundary) / (2 |domain|)`.
    pub truncation_bound: f64,
}

/// Per-path samples of `sum_k exp(-alpha t_k) g(X_{t_k}) dA_k` up to the horizon.
pub fn potential_u_samples(
    domain: &Domain,
    measure: &RobinMeasure,
    g: &dyn TestFunction,
    alpha: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    level: Level,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    check_common(domain, x, n, cfg)?;
    let scheme = cfg.scheme.build()?;
    let steps = level.steps_for(cfg.horizon);
    Ok(per_path(n, |i| {
        let streams = PathStreams::new(cfg.seed, i);
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
        let mut total = 0.0;
        for _ in 0..steps {
            let alive = fam.step();
            let ev = fam.events[0];
            if ev.functional > 0.0 {
                let t = fam.state(0).t;
                total += (-alpha * t).exp() * g.eval(ev.position) * ev.functional;
            }
            if !alive {
                break;
            }
        }
        total
    }))
}

/// `U_A^alpha g(x) = E_x[int_0^inf exp(-alpha t) g(X_t) dA_t]`, truncated at
/// the config horizon.
pub fn potential_u(
    domain: &Domain,
    measure: &RobinMeasure,
    g: &dyn TestFunction,
    alpha: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
) -> Result<PotentialEstimate> {
    let samples = potential_u_samples(domain, measure, g, alpha, x, n, cfg, cfg.level())?;
    Ok(PotentialEstimate {
        estimate: Estimate::from_samples(&samples, cfg.clone(), EstimatorKind::Potential),
        truncation_bound: potential_truncation_bound(domain, measure, g, alpha, cfg.horizon),
    })
}

/// Bound on the part of `U_A^alpha g` beyond `horizon`.
pub fn potential_truncation_bound(
    domain: &Domain,
    measure: &RobinMeasure,
    g: &dyn TestFunction,
    alpha: f64,
    horizon: f64,
) -> f64 {
    let rate = LOCAL_TIME_DENSITY * domain.boundary_measure() / domain.volume();
    g.sup_bound() * measure.sup_beta() * rate * (-alpha * horizon).exp() / alpha
}

/// Per-path samples of `|domain| / t * sum_k f(X_{t_k}) dA_k` from uniform
/// start points.
pub fn revuz_rate_samples(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    t_small: f64,
    n: u64,
    cfg: &SimConfig,
    level: Level,
) -> Result<Vec<f64>> {
    if !(t_small.is_finite() && t_small > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_small must be > 0, got {t_small}"
        )));
    }
    check_common(domain, domain.center(), n, cfg)?;
    let scheme = cfg.scheme.build()?;
    let steps = level.steps_for(t_small).max(1);
    let scale = domain.volume() / (steps as f64 * level.h);
    Ok(per_path(n, |i| {
        let streams = PathStreams::new(cfg.seed, i);
        let mut clock = streams.clock;
        let x0 = domain.sample_uniform(&mut clock);
        let mut fam = Family::new(
            domain,
            &[measure],
            scheme.as_ref(),
            level,
            cfg.bridge_correction,
            x0,
            streams.brownian,
            streams.bridge,
        );
        let mut total = 0.0;
        for _ in 0..steps {
            let alive = fam.step();
            let ev = fam.events[0];
            if ev.functional > 0.0 {
                total += f.eval(ev.position) * ev.functional;
            }
            if !alive {
                break;
            }
        }
        total * scale
    }))
}

/// Small-time rate `(1/t) E_m[int_0^t f dA]` under the uniform (Lebesgue)
/// start measure `m`.
pub fn revuz_rate(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    t_small: f64,
    n: u64,
    cfg: &SimConfig,
) -> Result<Estimate> {
    let samples = revuz_rate_samples(domain, measure, f, t_small, n, cfg, cfg.level())?;
    Ok(Estimate::from_samples(
        &samples,
        cfg.clone(),
        EstimatorKind::RevuzRate,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Constant;

    #[test]
    fn neumann_resolvent_is_exact() {
        let d = Domain::unit_disk();
        let m = RobinMeasure::neumann(&d);
        let cfg = SimConfig::new(1e-2, 1.0, 4);
        for alpha in [0.5, 1.0, 3.0] {
            let e = resolvent(&d, &m, &Constant(1.0), alpha, d.center(), 100, &cfg).unwrap();
            assert_eq!(e.mean, 1.0 / alpha);
            assert_eq!(e.std_error, 0.0);
        }
        assert!(resolvent(&d, &m, &Constant(1.0), 0.0, d.center(), 100, &cfg).is_err());
    }

    #[test]
    fn potential_vanishes_without_functional() {
        let d = Domain::unit_interval();
        let cfg = SimConfig::new(1e-3, 2.0, 4);
        let x = Point::on_line(0.05);
        let zero_beta = potential_u(
            &d,
            &RobinMeasure::neumann(&d),
            &Constant(1.0),
            1.0,
            x,
            50,
            &cfg,
        )
        .unwrap();
        assert_eq!(zero_beta.estimate.mean, 0.0);
        assert_eq!(zero_beta.truncation_bound, 0.0);
        let m = RobinMeasure::constant(&d, 1.0).unwrap();
        let zero_g = potential_u(&d, &m, &Constant(0.0), 1.0, x, 50, &cfg).unwrap();
        assert_eq!(zero_g.estimate.mean, 0.0);
        let some = potential_u(&d, &m, &Constant(1.0), 1.0, x, 50, &cfg).unwrap();
        assert!(some.estimate.mean > 0.0);
        assert!(potential_u(&d, &m, &Constant(1.0), -1.0, x, 50, &cfg).is_err());
    }

    #[test]
    fn revuz_rate_vanishes_for_neumann() {
        let d = Domain::unit_square();
        let cfg = SimConfig::new(1e-5, 1.0, 4);
        let e = revuz_rate(
            &d,
            &RobinMeasure::neumann(&d),
            &Constant(1.0),
            1e-3,
            100,
            &cfg,
        )
        .unwrap();
        assert_eq!(e.mean, 0.0);
        assert!(revuz_rate(
            &d,
            &RobinMeasure::neumann(&d),
            &Constant(1.0),
            0.0,
            100,
            &cfg
        )
        .is_err());
    }

    #[test]
    fn doubling_beta_doubles_functional_samples() {
        let d = Domain::unit_interval();
        let cfg = SimConfig::new(1e-5, 1.0, 8);
        let one = RobinMeasure::constant(&d, 1.0).unwrap();
        let a = revuz_rate_samples(&d, &one, &Constant(1.0), 1e-3, 200, &cfg, cfg.level()).unwrap();
        let b = revuz_rate_samples(
            &d,
            &one.scale(2.0),
            &Constant(1.0),
            1e-3,
            200,
            &cfg,
            cfg.level(),
        )
        .unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| *y == 2.0 * *x));
    }
}
