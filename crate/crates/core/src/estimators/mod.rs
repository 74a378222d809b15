//! Monte Carlo estimators for the killed semigroup, its resolvent, the
//! alpha-potential of the boundary functional and the Revuz rate.
//!
//! Every estimator evaluates one contribution per path, with path `i` drawing
//! only from the streams keyed by `(cfg.seed, i)`. Contributions are collected
//! in path order and reduced sequentially, so results are bit-identical under
//! any worker count.

mod functions;
mod operators;
mod semigroup;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::sampler::{check_start, SimConfig};

pub use functions::{
    check_sup_bound, function_names, Constant, Coordinate, FnFunction, FunctionConfig, RadialBump,
    TestFunction, TrigProduct,
};
pub use operators::{
    coupled_resolvent, potential_truncation_bound, potential_u, potential_u_samples, resolvent,
    resolvent_samples, revuz_rate, revuz_rate_samples, PotentialEstimate, LOCAL_TIME_DENSITY,
};
pub use semigroup::{
    coupled_semigroup, estimator, estimator_names, semigroup, semigroup_killed, semigroup_levels,
    semigroup_samples, semigroup_weight, DirichletEstimator, KilledEstimator, SemigroupEstimator,
    WeightEstimator,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Weight,
    Killed,
    Dirichlet,
    Resolvent,
    Potential,
    RevuzRate,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Weight => "weight",
            EstimatorKind::Killed => "killed",
            EstimatorKind::Dirichlet => "dirichlet",
            EstimatorKind::Resolvent => "resolvent",
            EstimatorKind::Potential => "potential",
            EstimatorKind::RevuzRate => "revuz-rate",
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: u64,
    pub cfg: SimConfig,
    pub kind: EstimatorKind,
}

impl Estimate {
    pub fn from_samples(samples: &[f64], cfg: SimConfig, kind: EstimatorKind) -> Self {
        let (mean, std_error) = mean_and_stderr(samples);
        Self {
            mean,
            std_error,
            n_paths: samples.len() as u64,
            cfg,
            kind,
        }
    }
}

/// Neumaier-compensated sum, in slice order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Mean and `sd / sqrt(n)` with the `n - 1` sample variance.
pub fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    // shifted by the first sample: constant samples give their value exactly
    let shift = samples[0];
    let mean = shift + compensated_sum(samples.iter().map(|v| v - shift)) / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let ss = compensated_sum(samples.iter().map(|v| (v - mean) * (v - mean)));
    let var = ss / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Evaluates `f(i)` for paths `0..n` in parallel and returns them in path order.
pub fn per_path<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

pub(crate) fn check_common(domain: &Domain, x: Point, n: u64, cfg: &SimConfig) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 paths, got {n}"
        )));
    }
    cfg.validate()?;
    check_start(domain, x)
}

pub(crate) fn check_time(t: f64, cfg: &SimConfig) -> Result<()> {
    if !(t >= 0.0 && t <= cfg.horizon * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "time {t} outside [0, horizon = {}]",
            cfg.horizon
        )));
    }
    Ok(())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be > 0, got {alpha}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stderr_of_constant_samples_is_zero() {
        let (m, s) = mean_and_stderr(&[0.25; 1000]);
        assert_eq!(m, 0.25);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn stderr_matches_textbook_formula() {
        let v = [1.0, 2.0, 3.0, 4.0];
        let (m, s) = mean_and_stderr(&v);
        assert_eq!(m, 2.5);
        // sample variance 5/3
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    proptest! {
        #[test]
        fn per_path_is_ordered(n in 2u64..500) {
            let v = per_path(n, |i| i * 3);
            prop_assert!(v.iter().enumerate().all(|(i, &x)| x == 3 * i as u64));
        }
    }
}
