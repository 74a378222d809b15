//! Reflecting Brownian motion with boundary local time.
//!
//! Paths follow `X_t = x0 + B_t + (accumulated reflection pushes)` where `B`
//! is a standard Brownian motion (variance `h` per coordinate per step), so
//! the estimated semigroups solve `du/dt = (1/2) Laplace(u)` with
//! `du/dn_out + beta u = 0` on the boundary. Along each path the sampler
//! accumulates the per-component local time `ell` and the functional
//! `A_t = integral of beta d ell`; paths that cross a Dirichlet component are
//! absorbed and frozen at the crossing point.

mod scheme;
mod walker;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boundary::RobinMeasure;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::rng::PathStreams;

pub use scheme::{
    scheme_names, step_occupation, step_project, OccupationScheme, ProjectionScheme,
    ReflectionScheme, SchemeConfig, StepOutcome,
};
pub use walker::{Family, NoiseStream, PathState, StepEvent, Walker};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Time step.
    pub h: f64,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub bridge_correction: bool,
    /// Longest time any estimator may simulate to.
    pub horizon: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(h: f64, horizon: f64, seed: u64) -> Self {
        Self {
            h,
            scheme: SchemeConfig::projection(),
            bridge_correction: false,
            horizon,
            seed,
        }
    }

    pub fn with_bridge(mut self, on: bool) -> Self {
        self.bridge_correction = on;
        self
    }

    pub fn with_scheme(mut self, scheme: SchemeConfig) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "h must be > 0, got {}",
                self.h
            )));
        }
        if !(self.horizon >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "horizon must be >= 0, got {}",
                self.horizon
            )));
        }
        self.scheme.build().map(|_| ())
    }

    pub fn level(&self) -> Level {
        Level {
            h: self.h,
            substeps: 1,
        }
    }

    /// Number of steps to reach time `t`, rounding to the nearest step.
    pub fn steps_for(&self, t: f64) -> u64 {
        (t / self.h).round() as u64
    }
}

/// Step size together with how many fine Gaussian draws make up one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub h: f64,
    pub substeps: u32,
}

impl Level {
    /// The level `factor` times coarser, driven by the same fine increments.
    pub fn coarsened(self, factor: u32) -> Level {
        Level {
            h: self.h * f64::from(factor),
            substeps: self.substeps * factor,
        }
    }

    pub fn steps_for(&self, t: f64) -> u64 {
        (t / self.h).round() as u64
    }
}

/// Probability that a Brownian bridge of duration `h` between points at
/// distances `d_start` and `d_end` from a flat boundary touches it:
/// `exp(-2 d_start d_end / h)`.
pub fn bridge_exit_probability(d_start: f64, d_end: f64, h: f64) -> f64 {
    if d_start <= 0.0 || d_end <= 0.0 {
        return 1.0;
    }
    (-2.0 * d_start * d_end / h).exp()
}

/// When to record the path.
#[derive(Debug, Clone, PartialEq)]
pub enum Observe {
    /// Initial state and every step up to the horizon.
    EveryStep,
    /// The listed times, each rounded to the nearest step.
    Times(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: f64,
    pub position: Point,
    pub ell: Vec<f64>,
    pub functional: f64,
    pub alive: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub dim: usize,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Writes `t, x..., ell_0..., A, alive` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let ncomp = self.records.first().map_or(0, |r| r.ell.len());
        let mut header = vec!["t".to_string()];
        header.extend((0..self.dim).map(|i| format!("x{i}")));
        header.extend((0..ncomp).map(|i| format!("ell_{i}")));
        header.push("A".into());
        header.push("alive".into());
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.t.to_string()];
            row.extend(r.position.coords(self.dim).iter().map(f64::to_string));
            row.extend(r.ell.iter().map(f64::to_string));
            row.push(r.functional.to_string());
            row.push(r.alive.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

fn record(state: &PathState, ncomp: usize) -> TraceRecord {
    TraceRecord {
        t: state.t,
        position: state.position,
        ell: state.ell[..ncomp].to_vec(),
        functional: state.functional,
        alive: state.alive,
    }
}

/// Simulates one path up to the config horizon and records it per `observe`.
pub fn simulate(
    domain: &Domain,
    measure: &RobinMeasure,
    x0: Point,
    cfg: &SimConfig,
    streams: PathStreams,
    observe: &Observe,
) -> Result<Trace> {
    cfg.validate()?;
    check_start(domain, x0)?;
    let scheme = cfg.scheme.build()?;
    let mut family = Family::new(
        domain,
        &[measure],
        scheme.as_ref(),
        cfg.level(),
        cfg.bridge_correction,
        x0,
        streams.brownian,
        streams.bridge,
    );
    let ncomp = domain.num_components();
    let total = cfg.steps_for(cfg.horizon);
    let mut targets: Vec<u64> = match observe {
        Observe::EveryStep => (0..=total).collect(),
        Observe::Times(ts) => ts.iter().map(|&t| cfg.steps_for(t).min(total)).collect(),
    };
    targets.sort_unstable();
    targets.dedup();

    let mut trace = Trace {
        dim: domain.dim(),
        records: Vec::with_capacity(targets.len()),
    };
    let mut next = targets.iter().peekable();
    for k in 0..=total {
        if k > 0 {
            family.step();
        }
        if next.peek() == Some(&&k) {
            trace.records.push(record(family.state(0), ncomp));
            next.next();
        }
    }
    Ok(trace)
}

pub(crate) fn check_start(domain: &Domain, x0: Point) -> Result<()> {
    let tol = 1e-12 * domain.diameter();
    if !x0.is_finite() || domain.signed_distance(x0) < -tol {
        return Err(Error::InvalidArgument(format!(
            "start point {x0} is outside the closed {} domain",
            domain.name()
        )));
    }
    if domain.dim() == 1 && x0.y != 0.0 {
        return Err(Error::InvalidArgument(
            "1D start point must have y = 0".into(),
        ));
    }
    Ok(())
}

/// First time the recorded functional reaches `z`, interpolating linearly
/// between records; `f64::INFINITY` when it never does.
pub fn kill_time(trace: &Trace, z: f64) -> f64 {
    let mut prev: Option<&TraceRecord> = None;
    for r in &trace.records {
        if r.functional >= z {
            return match prev {
                Some(p) if r.functional > p.functional => {
                    let frac = (z - p.functional) / (r.functional - p.functional);
                    p.t + frac * (r.t - p.t)
                }
                _ => r.t,
            };
        }
        prev = Some(r);
    }
    f64::INFINITY
}
