//! Run configuration files and their validation.

use std::fmt;
use std::path::Path;

use robin_core::boundary::{BoundarySpec, RobinMeasure};
use robin_core::estimators::{estimator_names, FunctionConfig, TestFunction};
use robin_core::geometry::{Domain, Point};
use robin_core::oracle::OracleConfig;
use robin_core::sampler::{SchemeConfig, SimConfig};
use serde::{Deserialize, Serialize};

/// Failure classes with distinct process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad config, unknown name or bad arguments: exit 2.
    Config(String),
    /// Anything that fails after validation: exit 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid config: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

pub fn config_err(e: impl fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

pub fn runtime_err(e: impl fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

pub const RESOLVENT: &str = "resolvent";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub sim: SimBlock,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudyConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub id: String,
    pub domain: Domain,
    /// One spec per boundary component, or a single spec for all of them.
    pub measure: Vec<BoundarySpec>,
    pub function: FunctionConfig,
    /// Semigroup estimators by registry name for time problems; `resolvent`
    /// for rate problems.
    #[serde(default)]
    pub estimators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Evaluation points as coordinate lists, `[x]` or `[x, y]`.
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    pub h: f64,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub bridge_correction: bool,
    /// Defaults to `t` for time problems and to 0 for rate problems, whose
    /// paths stop at their own exponential times.
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    pub n_paths: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_csv")]
    pub csv: String,
    #[serde(default = "default_json")]
    pub json: String,
    /// 0 silent, 1 one line per result, 2 also the resolved config.
    #[serde(default = "default_verbosity")]
    pub verbosity: u8,
}

fn default_csv() -> String {
    "results.csv".into()
}

fn default_json() -> String {
    "report.json".into()
}

fn default_verbosity() -> u8 {
    1
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            csv: default_csv(),
            json: default_json(),
            verbosity: default_verbosity(),
        }
    }
}

/// Ladder override for `study`; each kind has its own default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Time(f64),
    Rate(f64),
}

impl Target {
    pub fn value(self) -> f64 {
        match self {
            Target::Time(t) | Target::Rate(t) => t,
        }
    }
}

/// A validated config with every default filled in.
#[derive(Debug)]
pub struct Resolved {
    pub cfg: RunConfig,
    pub domain: Domain,
    pub measure: RobinMeasure,
    pub f: Box<dyn TestFunction>,
    pub points: Vec<Point>,
    pub sim: SimConfig,
    pub n_paths: u64,
    pub target: Target,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(mut self, seed: Option<u64>) -> Result<Resolved, CliError> {
        let p = &mut self.problem;
        let domain = p.domain.clone().validated().map_err(config_err)?;
        let specs = match p.measure.len() {
            1 => vec![p.measure[0].clone(); domain.num_components()],
            _ => p.measure.clone(),
        };
        let measure = RobinMeasure::new(&domain, specs).map_err(config_err)?;
        let f = p.function.build(&domain).map_err(config_err)?;

        let target = match (p.t, p.alpha) {
            (Some(t), None) if t.is_finite() && t >= 0.0 => Target::Time(t),
            (None, Some(a)) if a.is_finite() && a > 0.0 => Target::Rate(a),
            (Some(_), Some(_)) | (None, None) => {
                return Err(config_err("problem needs exactly one of `t` and `alpha`"))
            }
            (Some(t), None) => return Err(config_err(format!("t must be >= 0, got {t}"))),
            (None, Some(a)) => return Err(config_err(format!("alpha must be > 0, got {a}"))),
        };
        match target {
            Target::Time(_) => {
                if p.estimators.is_empty() {
                    p.estimators.push("weight".into());
                }
                let known = estimator_names();
                if let Some(bad) = p.estimators.iter().find(|e| !known.contains(&e.as_str())) {
                    return Err(config_err(format!(
                        "unknown estimator `{bad}` for a time problem (available: {})",
                        known.join(", ")
                    )));
                }
            }
            Target::Rate(_) => {
                if p.estimators.is_empty() {
                    p.estimators.push(RESOLVENT.into());
                }
                if let Some(bad) = p.estimators.iter().find(|e| *e != RESOLVENT) {
                    return Err(config_err(format!(
                        "unknown estimator `{bad}` for a rate problem (available: {RESOLVENT})"
                    )));
                }
            }
        }

        if p.points.is_empty() {
            return Err(config_err("problem.points is empty"));
        }
        let points = p
            .points
            .iter()
            .map(|c| {
                let pt = (c.len() == domain.dim())
                    .then(|| Point::from_coords(c))
                    .flatten()
                    .ok_or_else(|| {
                        config_err(format!("point {c:?} needs {} coordinates", domain.dim()))
                    })?;
                if !pt.is_finite() || domain.signed_distance(pt) < -1e-12 * domain.diameter() {
                    return Err(config_err(format!("point {c:?} is outside the domain")));
                }
                Ok(pt)
            })
            .collect::<Result<Vec<_>, _>>()?;

        if let Some(s) = seed {
            self.sim.seed = s;
        }
        let horizon = self.sim.horizon.unwrap_or(match target {
            Target::Time(t) => t,
            Target::Rate(_) => 0.0,
        });
        if let Target::Time(t) = target {
            if horizon < t {
                return Err(config_err(format!(
                    "sim.horizon {horizon} is shorter than t = {t}"
                )));
            }
        }
        self.sim.horizon = Some(horizon);
        let sim = SimConfig {
            h: self.sim.h,
            scheme: self.sim.scheme.clone(),
            bridge_correction: self.sim.bridge_correction,
            horizon,
            seed: self.sim.seed,
        };
        sim.validate().map_err(config_err)?;
        if self.sim.n_paths < 2 {
            return Err(config_err(format!(
                "sim.n_paths must be >= 2, got {}",
                self.sim.n_paths
            )));
        }
        if self.oracle.nodes < 3 || !(self.oracle.dt > 0.0) {
            return Err(config_err("oracle needs nodes >= 3 and dt > 0"));
        }
        if let Some(s) = &self.study {
            if s.values.is_empty() || s.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(config_err(
                    "study.values must be a nonempty list of positive numbers",
                ));
            }
        }
        Ok(Resolved {
            n_paths: self.sim.n_paths,
            cfg: self,
            domain,
            measure,
            f,
            points,
            sim,
            target,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "problem": {"id": "p", "domain": {"type": "interval", "a": 0, "b": 1},
                    "measure": [{"type": "robin", "beta": 1.0}],
                    "function": {"name": "one"}, "t": 0.25, "points": [[0.5]]},
        "sim": {"h": 0.001, "n_paths": 100}
    }"#;

    fn parse(s: &str) -> Result<Resolved, CliError> {
        serde_json::from_str::<RunConfig>(s)
            .map_err(config_err)?
            .resolve(None)
    }

    #[test]
    fn defaults_are_filled_in() {
        let r = parse(BASE).unwrap();
        assert_eq!(r.cfg.problem.estimators, ["weight"]);
        assert_eq!(r.cfg.sim.horizon, Some(0.25));
        assert_eq!(r.measure.num_components(), 2);
        assert_eq!(r.target, Target::Time(0.25));
        let json = serde_json::to_value(&r.cfg).unwrap();
        assert_eq!(json["output"]["csv"], "results.csv");
        assert_eq!(json["oracle"]["nodes"], 401);
    }

    #[test]
    fn rejects_bad_configs() {
        let unknown = BASE.replace("\"h\": 0.001", "\"h\": 0.001, \"steps\": 3");
        assert!(matches!(parse(&unknown), Err(CliError::Config(m)) if m.contains("steps")));
        let both = BASE.replace("\"t\": 0.25", "\"t\": 0.25, \"alpha\": 1");
        assert!(parse(&both).is_err());
        let outside = BASE.replace("[[0.5]]", "[[1.5]]");
        assert!(parse(&outside).is_err());
        let wrong_dim = BASE.replace("[[0.5]]", "[[0.5, 0.5]]");
        assert!(parse(&wrong_dim).is_err());
        let estimator = BASE.replace(
            "\"t\": 0.25",
            "\"t\": 0.25, \"estimators\": [\"resolvent\"]",
        );
        assert!(parse(&estimator).is_err());
        let no_domain = BASE.replace(
            "\"domain\": {\"type\": \"interval\", \"a\": 0, \"b\": 1},",
            "",
        );
        assert!(matches!(parse(&no_domain), Err(CliError::Config(m)) if m.contains("domain")));
    }

    #[test]
    fn seed_flag_overrides_the_file() {
        let cfg: RunConfig = serde_json::from_str(BASE).unwrap();
        let r = cfg.resolve(Some(9)).unwrap();
        assert_eq!(r.sim.seed, 9);
        assert_eq!(r.cfg.sim.seed, 9);
    }
}
