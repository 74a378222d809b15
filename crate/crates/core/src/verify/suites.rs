use serde::{Deserialize, Serialize};

use crate::boundary::RobinMeasure;
use crate::error::{Error, Result};
use crate::estimators::{Constant, RadialBump, TestFunction};
use crate::geometry::{Domain, Point};
use crate::oracle::OracleConfig;
use crate::sampler::SimConfig;

use super::checks::*;
use super::SuiteReport;

/// Overrides shared by every suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replaces each suite's default path count.
    pub n_paths: Option<u64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            n_paths: None,
        }
    }
}

impl SuiteOptions {
    fn n(&self, default: u64) -> u64 {
        self.n_paths.unwrap_or(default)
    }
}

/// A named property suite with a built-in desk-scale problem set.
pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn run(&self, opts: &SuiteOptions) -> Result<SuiteReport>;
}

fn unit_robin() -> (Domain, RobinMeasure) {
    let d = Domain::unit_interval();
    let m = RobinMeasure::constant(&d, 1.0).expect("valid rate");
    (d, m)
}

/// Collects sub-reports under one suite name, keeping the first config.
fn merge(name: &str, parts: Vec<(&str, SuiteReport)>) -> SuiteReport {
    let mut out = SuiteReport::new(name, &parts[0].1.cfg);
    for (prefix, r) in parts {
        out.absorb(prefix, r);
    }
    out
}

struct Sandwich;

impl Suite for Sandwich {
    fn name(&self) -> &'static str {
        "sandwich"
    }

    fn description(&self) -> &'static str {
        "Dirichlet <= Robin <= Neumann per coupled path, means against oracles"
    }

    fn run(&self, opts: &SuiteOptions) -> Result<SuiteReport> {
        let (d, m) = unit_robin();
        let cfg = SimConfig::new(1e-3, 0.25, opts.seed);
        let oc = OracleConfig::default();
        let one = Constant(1.0);
        let x = Point::on_line(0.5);
        let robin = check_sandwich(&d, &m, &one, 0.25, x, opts.n(10_000), &cfg, &oc)?;
        let zero = check_sandwich(
            &d,
            &RobinMeasure::neumann(&d),
            &one,
            0.25,
            x,
            opts.n(10_000),
            &cfg,
            &oc,
        )?;
        Ok(merge(
            self.name(),
            vec![("beta=1", robin), ("beta=0", zero)],
        ))
    }
}

struct Monotone;

impl Suite for Monotone {
    fn name(&self) -> &'static str {
        "monotone"
    }

    fn description(&self) -> &'static str {
        "weights nonincreasing along the ladder 0, 1/2, 1, 2, Dirichlet"
    }

    fn run(&self, opts: &SuiteOptions) -> Result<SuiteReport> {
        let d = Domain::unit_interval();
        let mut ladder = [0.0, 0.5, 1.0, 2.0]
            .iter()
            .map(|&b| RobinMeasure::constant(&d, b))
            .collect::<Result<Vec<_>>>()?;
        ladder.push(RobinMeasure::dirichlet(&d));
        let cfg = SimConfig::new(1e-3, 0.25, opts.seed);
        check_monotone(
            &d,
            &ladder,
            &Constant(1.0),
            0.25,
            Point::on_line(0.5),
            opts.n(10_000),
            &cfg,
            &OracleConfig::default(),
        )
    }
}

struct Resolvent;

impl Suite for Resolvent {
    fn name(&self) -> &'static str {
        "resolvent"
    }

    fn description(&self) -> &'static str {
        "R^A f - R f + U_A R^A f = 0 with the oracle resolvent as integrand"
    }

    fn run(&self, opts: &SuiteOptions) -> Result<SuiteReport> {
        let (d, m) = unit_robin();
        let cfg = SimConfig::new(2e-3, 8.0, opts.seed);
        let oc = OracleConfig::default();
        let one = Constant(1.0);
        let x = Point::on_line(0.5);
        let robin = check_resolvent_identity(&d, &m, &one, 1.0, x, opts.n(10_000), &cfg, &oc)?;
        let zero = check_resolvent_identity(
            &d,
            &RobinMeasure::neumann(&d),
            &one,
            1.0,
            x,
            opts.n(1_000),
            &cfg,
            &oc,
        )?;
        Ok(merge(
            self.name(),
            vec![("beta=1", robin), ("beta=0", zero)],
        ))
    }
}

struct Equivalence;

impl Suite for Equivalence {
    fn name(&self) -> &'static str {
        "equivalence"
    }

    fn description(&self) -> &'static str {
        "weight estimator E[f e^-A] against the killed estimator E[f; A < Z]"
    }

    fn run(&self, opts: &SuiteOptions) -> Result<SuiteReport> {
        let (d, m) = unit_robin();
        let cfg = SimConfig::new(1e-3, 0.25, opts.seed);
        let one = Constant(1.0);
        let n = opts.n(20_000);
        let interval =
            check_estimator_equivalence(&d, &m, &one, 0.25, Point::on_line(0.5), n, &cfg)?;
        let zero = check_estimator_equivalence(
            &d,
            &RobinMeasure::neumann(&d),
            &one,
            0.25,
            d.center(),
            n,
            &cfg,
        )?;
        let disk = Domain::unit_disk();
        let dm = RobinMeasure::constant(&disk, 1.0)?;
        let bump: &dyn TestFunction = &RadialBump {
            center: disk.center(),
            width: 0.7,
        };
        let on_disk =
            check_estimator_equivalence(&disk, &dm, bump, 0.25, Point::new(0.3, 0.0), n, &cfg)?;
        Ok(merge(
            self.name(),
            vec![("interval", interval), ("beta=0", zero), ("disk", on_disk)],
        ))
    }
}

struct MuConvergence;

impl Suite for MuConvergence {
    fn name(&self) -> &'static str {
        "mu-convergence"
    }

    fn description(&self) -> &'static str {
        "resolvents along beta/k toward Neumann and k beta toward Dirichlet"
    }

    fn run(&self, opts: &SuiteOptions) -> Result<SuiteReport> {
        let (d, m) = unit_robin();
        let cfg = SimConfig::new(1e-3, 1.0, opts.seed);
        check_mu_convergence(
            &d,
            &m,
            &Constant(1.0),
            1.0,
            Point::on_line(0.5),
            opts.n(10_000),
            &cfg,
            &OracleConfig::default(),
        )
    }
}

struct Revuz;

impl Suite for Revuz {
    fn name(&self) -> &'static str {
        "revuz"
    }

    fn description(&self) -> &'static str {
        "small-time boundary rates give one constant c on the interval and the square"
    }

    fn run(&self, opts: &SuiteOptions) -> Result<SuiteReport> {
        let problems = [Domain::unit_interval(), Domain::unit_square()]
            .into_iter()
            .map(|d| {
                Ok(RevuzProblem {
                    measure: RobinMeasure::constant(&d, 1.0)?,
                    domain: d,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cfg = SimConfig::new(1e-5, 1.0, opts.seed);
        let (mut report, _) =
            check_revuz(&problems, &[4e-3, 2e-3, 1e-3], 100, opts.n(100_000), &cfg)?;
        let zero = RevuzProblem {
            domain: Domain::unit_interval(),
            measure: RobinMeasure::neumann(&Domain::unit_interval()),
        };
        let (z, _) = check_revuz(&[zero], &[1e-3], 100, opts.n(1_000), &cfg)?;
        report.absorb("beta=0", z);
        Ok(report)
    }
}

static SUITES: &[&dyn Suite] = &[
    &Sandwich,
    &Monotone,
    &Resolvent,
    &Equivalence,
    &MuConvergence,
    &Revuz,
];

pub fn suites() -> &'static [&'static dyn Suite] {
    SUITES
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name()).collect()
}

pub fn suite(name: &str) -> Result<&'static dyn Suite> {
    SUITES
        .iter()
        .copied()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::UnknownName {
            kind: "suite",
            name: name.into(),
            available: suite_names().join(", "),
        })
}
