//! Executable property suites: exact pathwise orderings under common random
//! numbers, and statistical comparisons against the oracles.
//!
//! Statistical checks pass when `|observed - reference| <= k * std_error +
//! allowance`. The allowance is calibrated per check from a second run at
//! four times the step size, driven by the same Brownian increments:
//! `1.5 * |mean(h) - mean(4h)|`. For an order one half scheme this
//! difference is about the bias at `h` itself.

mod checks;
mod suites;

use serde::Serialize;
use serde_json::Value;

use crate::sampler::SimConfig;

pub use checks::{
    check_estimator_equivalence, check_monotone, check_mu_convergence, check_resolvent_identity,
    check_revuz, check_sandwich, extrapolate_to_zero, resolvent_identity_samples, IdentitySamples,
    RevuzOutcome, RevuzProblem,
};
pub use suites::{suite, suite_names, suites, Suite, SuiteOptions};

/// Multiplier on the coarse-fine difference.
pub const ALLOWANCE_FACTOR: f64 = 1.5;
/// Ratio between the coarse and fine step of the allowance run.
pub const COARSENING: u32 = 4;
/// Rounding slack for comparisons whose two sides are both exact in exact
/// arithmetic, e.g. a zero-variance estimate against a constant oracle.
pub const ROUNDING_SLACK: f64 = 1e-9;

pub fn allowance(fine_mean: f64, coarse_mean: f64) -> f64 {
    ALLOWANCE_FACTOR * (fine_mean - coarse_mean).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// A count of violations that must be zero.
    Exact,
    /// `|observed - reference| <= tolerance`.
    Statistical,
    /// `observed <= reference` (or `>=` for a lower bound).
    Bound,
    /// Recorded value only.
    Info,
}

/// One pass/fail line with everything needed to audit it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub kind: CheckKind,
    pub inputs: Value,
    pub observed: f64,
    pub reference: f64,
    pub std_error: f64,
    pub allowance: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn exact(name: impl Into<String>, inputs: Value, violations: u64) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Exact,
            inputs,
            observed: violations as f64,
            reference: 0.0,
            std_error: 0.0,
            allowance: 0.0,
            tolerance: 0.0,
            pass: violations == 0,
        }
    }

    /// Passes when `|observed - reference| <= k * std_error + allowance`.
    pub fn within(
        name: impl Into<String>,
        inputs: Value,
        observed: f64,
        reference: f64,
        std_error: f64,
        k: f64,
        allowance: f64,
    ) -> Self {
        let tolerance = k * std_error + allowance;
        Self {
            name: name.into(),
            kind: CheckKind::Statistical,
            inputs,
            observed,
            reference,
            std_error,
            allowance,
            tolerance,
            pass: (observed - reference).abs() <= tolerance,
        }
    }

    /// Passes when `|observed - reference| <= rel * |reference|`.
    pub fn within_relative(
        name: impl Into<String>,
        inputs: Value,
        observed: f64,
        reference: f64,
        std_error: f64,
        rel: f64,
    ) -> Self {
        let tolerance = rel * reference.abs();
        Self {
            name: name.into(),
            kind: CheckKind::Statistical,
            inputs,
            observed,
            reference,
            std_error,
            allowance: 0.0,
            tolerance,
            pass: (observed - reference).abs() <= tolerance,
        }
    }

    /// Passes when `observed <= limit`.
    pub fn at_most(name: impl Into<String>, inputs: Value, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Bound,
            inputs,
            observed,
            reference: limit,
            std_error: 0.0,
            allowance: 0.0,
            tolerance: 0.0,
            pass: observed <= limit,
        }
    }

    /// Passes when `observed >= limit`.
    pub fn at_least(name: impl Into<String>, inputs: Value, observed: f64, limit: f64) -> Self {
        Self {
            pass: observed >= limit,
            ..Self::at_most(name, inputs, observed, limit)
        }
    }

    pub fn info(name: impl Into<String>, inputs: Value, observed: f64, std_error: f64) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Info,
            inputs,
            observed,
            reference: observed,
            std_error,
            allowance: 0.0,
            tolerance: 0.0,
            pass: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cfg: SimConfig,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, cfg: &SimConfig) -> Self {
        Self {
            suite: suite.into(),
            seed: cfg.seed,
            cfg: cfg.clone(),
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        self.passed &= check.pass;
        self.checks.push(check);
    }

    /// Appends the checks of `other`, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: SuiteReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}: {}", c.name);
            self.push(c);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}
