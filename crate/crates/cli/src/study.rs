//! Parameter ladders written as `parameter, mean, stderr, oracle, gap` tables.
//! Each study uses the first configured estimator at the first point.

use std::path::Path;

use robin_core::boundary::RobinMeasure;
use robin_core::estimators::{coupled_resolvent, coupled_semigroup, mean_and_stderr};
use robin_core::sampler::Level;

use crate::artifact::{num, out_path, write_csv};
use crate::config::{config_err, runtime_err, CliError, Resolved, Target, RESOLVENT};
use crate::run::{oracle, samples, target_measure};

pub const CSV_HEADER: &[&str] = &["parameter", "mean", "stderr", "oracle", "gap"];

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub parameter: f64,
    pub mean: f64,
    pub stderr: f64,
    pub oracle: Option<f64>,
    pub gap: Option<f64>,
}

pub trait Study: Sync {
    fn name(&self) -> &'static str;

    fn default_values(&self) -> &'static [f64];

    fn run(&self, r: &Resolved, values: &[f64]) -> Result<Vec<StudyRow>, CliError>;
}

fn first(r: &Resolved) -> (&str, robin_core::geometry::Point) {
    (r.cfg.problem.estimators[0].as_str(), r.points[0])
}

fn oracle_value(r: &Resolved, measure: &RobinMeasure) -> Result<Option<f64>, CliError> {
    Ok(oracle(r, measure)?.map(|s| s.value_at(r.points[0])))
}

/// Gap to the oracle as `|mean - oracle|`.
fn row(parameter: f64, samples: &[f64], oracle: Option<f64>) -> StudyRow {
    let (mean, stderr) = mean_and_stderr(samples);
    StudyRow {
        parameter,
        mean,
        stderr,
        oracle,
        gap: oracle.map(|o| (mean - o).abs()),
    }
}

/// Step sizes that are integer multiples of the smallest one are run on
/// coarsenings of its Brownian increments, so the ladder is coupled.
struct StepSize;

impl Study for StepSize {
    fn name(&self) -> &'static str {
        "step-size"
    }

    fn default_values(&self) -> &'static [f64] {
        &[4e-4, 1e-4, 2.5e-5]
    }

    fn run(&self, r: &Resolved, values: &[f64]) -> Result<Vec<StudyRow>, CliError> {
        let (est, x) = first(r);
        let measure = target_measure(r, est);
        let o = oracle_value(r, &measure)?;
        let finest = values.iter().copied().fold(f64::INFINITY, f64::min);
        let base = Level {
            h: finest,
            substeps: 1,
        };
        values
            .iter()
            .map(|&h| {
                let ratio = h / finest;
                let m = ratio.round();
                let level = if (ratio - m).abs() <= 1e-9 * ratio && m <= f64::from(u32::MAX) {
                    base.coarsened(m as u32)
                } else {
                    Level { h, substeps: 1 }
                };
                let s = samples(
                    r,
                    &measure,
                    est,
                    x,
                    &r.sim.clone().with_h(h),
                    level,
                    r.n_paths,
                )?;
                Ok(row(h, &s, o))
            })
            .collect()
    }
}

/// One run at the largest count; smaller counts are its leading paths.
struct Paths;

impl Study for Paths {
    fn name(&self) -> &'static str {
        "paths"
    }

    fn default_values(&self) -> &'static [f64] {
        &[1e3, 1e4, 1e5]
    }

    fn run(&self, r: &Resolved, values: &[f64]) -> Result<Vec<StudyRow>, CliError> {
        if values.iter().any(|&n| n.fract() != 0.0 || n < 2.0) {
            return Err(config_err("paths study values must be integers >= 2"));
        }
        let (est, x) = first(r);
        let measure = target_measure(r, est);
        let o = oracle_value(r, &measure)?;
        let n_max = values.iter().copied().fold(0.0, f64::max) as u64;
        let s = samples(r, &measure, est, x, &r.sim, r.sim.level(), n_max)?;
        Ok(values
            .iter()
            .map(|&n| row(n, &s[..n as usize], o))
            .collect())
    }
}

/// Rates `beta / k` on shared noise. `gap` is the paired mean distance to the
/// Neumann run, which is pathwise nonincreasing in `k`.
struct MuLadder;

impl Study for MuLadder {
    fn name(&self) -> &'static str {
        "mu-ladder"
    }

    fn default_values(&self) -> &'static [f64] {
        &[1.0, 2.0, 4.0, 8.0, 16.0]
    }

    fn run(&self, r: &Resolved, values: &[f64]) -> Result<Vec<StudyRow>, CliError> {
        let (est, x) = first(r);
        if r.measure.has_dirichlet() {
            return Err(config_err(
                "mu-ladder needs a measure without Dirichlet components",
            ));
        }
        if est != "weight" && est != RESOLVENT {
            return Err(config_err(format!(
                "mu-ladder runs the weight or resolvent estimator, not `{est}`"
            )));
        }
        let mut family: Vec<RobinMeasure> =
            values.iter().map(|k| r.measure.scale(1.0 / k)).collect();
        family.push(RobinMeasure::neumann(&r.domain));
        let f = r.f.as_ref();
        let cols = match r.target {
            Target::Time(t) => coupled_semigroup(
                &r.domain,
                &family,
                f,
                t,
                x,
                r.n_paths,
                &r.sim,
                r.sim.level(),
            ),
            Target::Rate(a) => coupled_resolvent(
                &r.domain,
                &family,
                f,
                a,
                x,
                r.n_paths,
                &r.sim,
                r.sim.level(),
            ),
        }
        .map_err(runtime_err)?;
        let free = &cols[values.len()];
        values
            .iter()
            .zip(&family)
            .zip(&cols)
            .map(|((&k, m), col)| {
                let (mean, stderr) = mean_and_stderr(col);
                let diff: Vec<f64> = free.iter().zip(col).map(|(a, b)| a - b).collect();
                Ok(StudyRow {
                    parameter: k,
                    mean,
                    stderr,
                    oracle: oracle_value(r, m)?,
                    gap: Some(mean_and_stderr(&diff).0),
                })
            })
            .collect()
    }
}

static STUDIES: &[&dyn Study] = &[&StepSize, &Paths, &MuLadder];

pub fn study_names() -> Vec<&'static str> {
    STUDIES.iter().map(|s| s.name()).collect()
}

pub fn find(name: &str) -> Result<&'static dyn Study, CliError> {
    STUDIES
        .iter()
        .copied()
        .find(|s| s.name() == name)
        .ok_or_else(|| {
            CliError::Config(format!(
                "unknown study `{name}` (available: {})",
                study_names().join(", ")
            ))
        })
}

pub fn study(kind: &dyn Study, r: &Resolved, out: &Path) -> Result<Vec<StudyRow>, CliError> {
    let values = r
        .cfg
        .study
        .as_ref()
        .map_or_else(|| kind.default_values().to_vec(), |s| s.values.clone());
    let rows = kind.run(r, &values)?;
    if r.cfg.output.verbosity >= 1 {
        for s in &rows {
            println!(
                "{} {}: mean {:.6} se {:.2e} oracle {} gap {}",
                kind.name(),
                s.parameter,
                s.mean,
                s.stderr,
                num(s.oracle),
                num(s.gap)
            );
        }
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|s| {
            vec![
                s.parameter.to_string(),
                s.mean.to_string(),
                s.stderr.to_string(),
                num(s.oracle),
                num(s.gap),
            ]
        })
        .collect();
    // the resolved ladder goes into the embedded config
    let mut cfg = r.cfg.clone();
    cfg.study = Some(crate::config::StudyConfig { values });
    write_csv(
        &out_path(out, &format!("study-{}.csv", kind.name()))?,
        &cfg,
        CSV_HEADER,
        &table,
    )?;
    Ok(rows)
}
