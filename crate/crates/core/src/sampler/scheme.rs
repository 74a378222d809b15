//! Discrete reflection schemes for the Skorohod problem.
//!
//! A scheme turns an unconstrained proposal `Y = X + dW` into the next
//! reflected position and the boundary local time collected on the step.
//! Schemes are selected by name through [`SchemeConfig`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, Domain, Point};

/// Outcome of one reflected step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub position: Point,
    /// Local-time increment.
    pub local_time: f64,
    /// Boundary point the increment is attributed to (`None` when zero).
    pub boundary: Option<BoundaryPoint>,
}

pub trait ReflectionScheme: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Reflects `proposal` (reached from `x` in time `h`) into the closed domain.
    fn reflect(&self, domain: &Domain, x: Point, proposal: Point, h: f64) -> StepOutcome;
}

/// One step of the discrete Skorohod map: proposals outside the domain are
/// projected to the nearest boundary point and the overshoot distance is
/// booked as local time.
pub fn step_project(domain: &Domain, x: Point, dw: Point) -> StepOutcome {
    project_proposal(domain, x + dw)
}

fn project_proposal(domain: &Domain, y: Point) -> StepOutcome {
    let d = domain.signed_distance(y);
    if d >= 0.0 {
        return StepOutcome {
            position: y,
            local_time: 0.0,
            boundary: None,
        };
    }
    let bp = domain.project(y);
    StepOutcome {
        position: bp.position,
        local_time: -d,
        boundary: Some(bp),
    }
}

/// Mirror-reflection step with an occupation-density local time: the path
/// collects `h / (2 eps)` for every step that ends within `eps` of the
/// boundary.
pub fn step_occupation(domain: &Domain, x: Point, dw: Point, eps: f64, h: f64) -> StepOutcome {
    occupation_proposal(domain, x + dw, eps, h)
}

fn occupation_proposal(domain: &Domain, y: Point, eps: f64, h: f64) -> StepOutcome {
    let position = if domain.contains(y) {
        y
    } else {
        domain.mirror(y)
    };
    if domain.signed_distance(position) < eps {
        StepOutcome {
            position,
            local_time: h / (2.0 * eps),
            boundary: Some(domain.project(position)),
        }
    } else {
        StepOutcome {
            position,
            local_time: 0.0,
            boundary: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ProjectionScheme;

impl ReflectionScheme for ProjectionScheme {
    fn name(&self) -> &'static str {
        "projection"
    }

    fn reflect(&self, domain: &Domain, _x: Point, proposal: Point, _h: f64) -> StepOutcome {
        project_proposal(domain, proposal)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OccupationScheme {
    pub eps: f64,
}

impl ReflectionScheme for OccupationScheme {
    fn name(&self) -> &'static str {
        "occupation"
    }

    fn reflect(&self, domain: &Domain, _x: Point, proposal: Point, h: f64) -> StepOutcome {
        occupation_proposal(domain, proposal, self.eps, h)
    }
}

/// Scheme selection as it appears in run configs:
/// `{"type": "projection"}` or `{"type": "occupation", "eps": 0.005}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    #[serde(rename = "type")]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self::projection()
    }
}

impl SchemeConfig {
    pub fn projection() -> Self {
        Self {
            name: "projection".into(),
            eps: None,
        }
    }

    pub fn occupation(eps: f64) -> Self {
        Self {
            name: "occupation".into(),
            eps: Some(eps),
        }
    }

    pub fn build(&self) -> Result<Box<dyn ReflectionScheme>> {
        let entry = SCHEMES
            .iter()
            .find(|e| e.name == self.name)
            .ok_or_else(|| Error::UnknownName {
                kind: "scheme",
                name: self.name.clone(),
                available: scheme_names().join(", "),
            })?;
        (entry.build)(self)
    }
}

struct SchemeEntry {
    name: &'static str,
    build: fn(&SchemeConfig) -> Result<Box<dyn ReflectionScheme>>,
}

const SCHEMES: &[SchemeEntry] = &[
    SchemeEntry {
        name: "projection",
        build: |cfg| {
            if cfg.eps.is_some() {
                return Err(Error::InvalidConfig(
                    "projection scheme takes no eps".into(),
                ));
            }
            Ok(Box::new(ProjectionScheme))
        },
    },
    SchemeEntry {
        name: "occupation",
        build: |cfg| match cfg.eps {
            Some(eps) if eps.is_finite() && eps > 0.0 => Ok(Box::new(OccupationScheme { eps })),
            other => Err(Error::InvalidConfig(format!(
                "occupation scheme needs eps > 0, got {other:?}"
            ))),
        },
    },
];

pub fn scheme_names() -> Vec<&'static str> {
    SCHEMES.iter().map(|e| e.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn projection_examples() {
        let i = Domain::unit_interval();
        let out = step_project(&i, Point::on_line(0.1), Point::on_line(-0.3));
        assert_eq!(out.position, Point::on_line(0.0));
        assert_abs_diff_eq!(out.local_time, 0.2, epsilon = 1e-15);
        assert_eq!(out.boundary.unwrap().component, 0);

        let out = step_project(&i, Point::on_line(0.5), Point::on_line(0.1));
        assert_abs_diff_eq!(out.position.x, 0.6, epsilon = 1e-15);
        assert_eq!(out.local_time, 0.0);
        assert!(out.boundary.is_none());

        let out = step_project(
            &Domain::unit_disk(),
            Point::new(0.95, 0.0),
            Point::new(0.15, 0.0),
        );
        assert_abs_diff_eq!(out.position.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.local_time, 0.10, epsilon = 1e-12);
        assert_eq!(out.boundary.unwrap().component, 0);
    }

    #[test]
    fn occupation_examples() {
        let i = Domain::unit_interval();
        let out = step_occupation(&i, Point::on_line(0.05), Point::on_line(-0.1), 0.02, 1e-4);
        assert_abs_diff_eq!(out.position.x, 0.05, epsilon = 1e-15);
        assert_eq!(out.local_time, 0.0);

        let out = step_occupation(&i, Point::on_line(0.005), Point::on_line(0.001), 0.02, 1e-4);
        assert_abs_diff_eq!(out.position.x, 0.006, epsilon = 1e-15);
        assert_abs_diff_eq!(out.local_time, 2.5e-3, epsilon = 1e-15);
        assert_eq!(out.boundary.unwrap().component, 0);
    }

    #[test]
    fn registry_resolves_names() {
        assert_eq!(
            SchemeConfig::projection().build().unwrap().name(),
            "projection"
        );
        assert_eq!(
            SchemeConfig::occupation(0.01).build().unwrap().name(),
            "occupation"
        );
        assert!(SchemeConfig::occupation(0.0).build().is_err());
        let err = SchemeConfig {
            name: "milstein".into(),
            eps: None,
        }
        .build()
        .unwrap_err();
        assert!(err.to_string().contains("projection, occupation"));
    }
}
