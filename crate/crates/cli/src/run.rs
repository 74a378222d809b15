//! Sampling and oracle lookups shared by `solve` and `study`.

use robin_core::boundary::RobinMeasure;
use robin_core::error::Error;
use robin_core::estimators::{estimator, resolvent_samples, semigroup_samples};
use robin_core::geometry::{Domain, Point};
use robin_core::oracle::{resolvent_reference, semigroup_reference, FdSolution};
use robin_core::sampler::{Level, SimConfig};

use crate::config::{runtime_err, CliError, Resolved, Target};

/// Registry functions that are radial about the domain center; the disk
/// oracle only handles those.
const RADIAL: &[&str] = &["one", "zero", "constant", "radial-bump"];

pub fn samples(
    r: &Resolved,
    measure: &RobinMeasure,
    est: &str,
    x: Point,
    sim: &SimConfig,
    level: Level,
    n: u64,
) -> Result<Vec<f64>, CliError> {
    match r.target {
        Target::Time(t) => {
            let e = estimator(est).map_err(runtime_err)?;
            semigroup_samples(
                &r.domain,
                measure,
                r.f.as_ref(),
                t,
                x,
                n,
                sim,
                e.as_ref(),
                level,
            )
        }
        Target::Rate(a) => resolvent_samples(&r.domain, measure, r.f.as_ref(), a, x, n, sim, level),
    }
    .map_err(runtime_err)
}

/// The measure an estimator actually targets: the Dirichlet estimator ignores
/// the configured rates.
pub fn target_measure(r: &Resolved, est: &str) -> RobinMeasure {
    if est == "dirichlet" {
        RobinMeasure::dirichlet(&r.domain)
    } else {
        r.measure.clone()
    }
}

/// Grid solution for `measure`, or `None` where no oracle exists.
pub fn oracle(r: &Resolved, measure: &RobinMeasure) -> Result<Option<FdSolution>, CliError> {
    let oc = &r.cfg.oracle;
    let f = r.f.as_ref();
    let sol = match r.target {
        Target::Time(t) => semigroup_reference(&r.domain, measure, f, t, oc),
        Target::Rate(a) => {
            if matches!(r.domain, Domain::Disk { .. })
                && !RADIAL.contains(&r.cfg.problem.function.name.as_str())
            {
                return Ok(None);
            }
            resolvent_reference(&r.domain, measure, f, a, oc)
        }
    };
    match sol {
        Ok(s) => Ok(Some(s)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(runtime_err(e)),
    }
}
