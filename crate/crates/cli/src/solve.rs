use std::path::Path;

use robin_core::estimators::mean_and_stderr;
use robin_core::oracle::CONVENTION;
use robin_core::verify::{allowance, COARSENING};
use serde::Serialize;

use crate::artifact::{out_path, write_csv, write_json, VERSION};
use crate::config::{CliError, Resolved, RunConfig};
use crate::run::{oracle, samples, target_measure};

pub const CSV_HEADER: &[&str] = &[
    "problem_id",
    "estimator_kind",
    "t_or_alpha",
    "x0",
    "x1",
    "mean",
    "std_error",
    "n_paths",
    "h",
    "scheme",
];

const ALLOWANCE_RULE: &str =
    "1.5 * |mean(h) - mean(4h)| with the coarse run on the same Brownian increments";

#[derive(Debug, Serialize)]
struct SolveRow {
    estimator: String,
    point: Vec<f64>,
    mean: f64,
    std_error: f64,
    n_paths: u64,
    coarse_mean: f64,
    allowance: f64,
    oracle: Option<f64>,
    abs_diff: Option<f64>,
    /// `3 * std_error + allowance`.
    tolerance: f64,
    within_tolerance: Option<bool>,
}

#[derive(Debug, Serialize)]
struct SolveReport<'a> {
    version: &'static str,
    convention: &'static str,
    seed: u64,
    allowance_rule: &'static str,
    config: &'a RunConfig,
    results: Vec<SolveRow>,
}

pub fn solve(r: &Resolved, out: &Path) -> Result<(), CliError> {
    let verbose = r.cfg.output.verbosity;
    if verbose >= 2 {
        println!(
            "{}",
            serde_json::to_string_pretty(&r.cfg).unwrap_or_default()
        );
    }
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    for est in &r.cfg.problem.estimators {
        let measure = target_measure(r, est);
        let sol = oracle(r, &measure)?;
        for (x, coords) in r.points.iter().zip(&r.cfg.problem.points) {
            let fine = samples(r, &measure, est, *x, &r.sim, r.sim.level(), r.n_paths)?;
            let coarse = samples(
                r,
                &measure,
                est,
                *x,
                &r.sim,
                r.sim.level().coarsened(COARSENING),
                r.n_paths,
            )?;
            let (mean, se) = mean_and_stderr(&fine);
            let coarse_mean = mean_and_stderr(&coarse).0;
            let allow = allowance(mean, coarse_mean);
            let reference = sol.as_ref().map(|s| s.value_at(*x));
            let tolerance = 3.0 * se + allow;
            let abs_diff = reference.map(|o| (mean - o).abs());
            if verbose >= 1 {
                let o = reference.map_or("-".to_string(), |o| format!("{o:.6}"));
                println!("{est} at {coords:?}: mean {mean:.6} se {se:.2e} allowance {allow:.2e} oracle {o}");
            }
            csv_rows.push(vec![
                r.cfg.problem.id.clone(),
                est.clone(),
                r.target.value().to_string(),
                x.x.to_string(),
                if r.domain.dim() == 2 {
                    x.y.to_string()
                } else {
                    String::new()
                },
                mean.to_string(),
                se.to_string(),
                r.n_paths.to_string(),
                r.sim.h.to_string(),
                r.sim.scheme.name.clone(),
            ]);
            rows.push(SolveRow {
                estimator: est.clone(),
                point: coords.clone(),
                mean,
                std_error: se,
                n_paths: r.n_paths,
                coarse_mean,
                allowance: allow,
                oracle: reference,
                abs_diff,
                tolerance,
                within_tolerance: abs_diff.map(|d| d <= tolerance),
            });
        }
    }
    let csv_path = out_path(out, &r.cfg.output.csv)?;
    write_csv(&csv_path, &r.cfg, CSV_HEADER, &csv_rows)?;
    let report = SolveReport {
        version: VERSION,
        convention: CONVENTION,
        seed: r.sim.seed,
        allowance_rule: ALLOWANCE_RULE,
        config: &r.cfg,
        results: rows,
    };
    write_json(&out_path(out, &r.cfg.output.json)?, &report)?;
    Ok(())
}
