//! Bounded test functions and the built-in registry used by run configs.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

pub trait TestFunction: Send + Sync + fmt::Debug {
    fn eval(&self, p: Point) -> f64;

    /// Bound on `|f|` over the closed domain.
    fn sup_bound(&self) -> f64;

    fn name(&self) -> String;
}

#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl TestFunction for Constant {
    fn eval(&self, _p: Point) -> f64 {
        self.0
    }

    fn sup_bound(&self) -> f64 {
        self.0.abs()
    }

    fn name(&self) -> String {
        format!("constant({})", self.0)
    }
}

/// A coordinate `x` (axis 0) or `y` (axis 1).
#[derive(Debug, Clone, Copy)]
pub struct Coordinate {
    pub axis: usize,
    pub bound: f64,
}

impl TestFunction for Coordinate {
    fn eval(&self, p: Point) -> f64 {
        if self.axis == 0 {
            p.x
        } else {
            p.y
        }
    }

    fn sup_bound(&self) -> f64 {
        self.bound
    }

    fn name(&self) -> String {
        ["x", "y"][self.axis.min(1)].to_string()
    }
}

/// Products of `sin(k pi s)` or `cos(k pi s)` in the coordinates rescaled to
/// `s in [0, 1]` over the domain's bounding box.
#[derive(Debug, Clone)]
pub struct TrigProduct {
    pub cosine: bool,
    pub modes: Vec<u32>,
    pub lo: [f64; 2],
    pub len: [f64; 2],
}

impl TestFunction for TrigProduct {
    fn eval(&self, p: Point) -> f64 {
        let c = [p.x, p.y];
        self.modes
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let arg = f64::from(k) * PI * (c[i] - self.lo[i]) / self.len[i];
                if self.cosine {
                    arg.cos()
                } else {
                    arg.sin()
                }
            })
            .product()
    }

    fn sup_bound(&self) -> f64 {
        1.0
    }

    fn name(&self) -> String {
        let kind = if self.cosine { "cos" } else { "sin" };
        format!("{kind}-product{:?}", self.modes)
    }
}

/// `exp(-|p - center|^2 / width^2)`.
#[derive(Debug, Clone, Copy)]
pub struct RadialBump {
    pub center: Point,
    pub width: f64,
}

impl TestFunction for RadialBump {
    fn eval(&self, p: Point) -> f64 {
        let r = (p - self.center).norm() / self.width;
        (-r * r).exp()
    }

    fn sup_bound(&self) -> f64 {
        1.0
    }

    fn name(&self) -> String {
        format!("radial-bump({})", self.width)
    }
}

/// Wraps a closure, e.g. an interpolated oracle solution.
#[derive(Clone)]
pub struct FnFunction {
    pub label: String,
    pub bound: f64,
    pub f: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
}

impl FnFunction {
    pub fn new(
        label: impl Into<String>,
        bound: f64,
        f: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            bound,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnFunction")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .finish()
    }
}

impl TestFunction for FnFunction {
    fn eval(&self, p: Point) -> f64 {
        (self.f)(p)
    }

    fn sup_bound(&self) -> f64 {
        self.bound
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

/// Spot-checks `|f| <= sup_bound` on an `n`-per-axis grid over the domain.
pub fn check_sup_bound(f: &dyn TestFunction, domain: &Domain, n: usize) -> bool {
    let (lo, len) = bounding_box(domain);
    let n = n.max(2);
    let tol = 1e-12 * f.sup_bound().max(1.0);
    let ny = if domain.dim() == 1 { 1 } else { n };
    for i in 0..n {
        for j in 0..ny {
            let x = lo[0] + len[0] * i as f64 / (n - 1) as f64;
            let y = if domain.dim() == 1 {
                0.0
            } else {
                lo[1] + len[1] * j as f64 / (n - 1) as f64
            };
            let p = Point::new(x, y);
            if domain.contains(p) && f.eval(p).abs() > f.sup_bound() + tol {
                return false;
            }
        }
    }
    true
}

fn bounding_box(domain: &Domain) -> ([f64; 2], [f64; 2]) {
    match *domain {
        Domain::Interval { a, b } => ([a, 0.0], [b - a, 1.0]),
        Domain::Rectangle { x0, x1, y0, y1 } => ([x0, y0], [x1 - x0, y1 - y0]),
        Domain::Disk { center, radius } => (
            [center.x - radius, center.y - radius],
            [2.0 * radius, 2.0 * radius],
        ),
    }
}

/// Built-in function selection as it appears in run configs, e.g.
/// `{"name": "sin-product", "modes": [1, 2]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

impl FunctionConfig {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.into(),
            value: None,
            modes: None,
            width: None,
        }
    }

    pub fn build(&self, domain: &Domain) -> Result<Box<dyn TestFunction>> {
        let entry = FUNCTIONS
            .iter()
            .find(|e| e.name == self.name)
            .ok_or_else(|| Error::UnknownName {
                kind: "test function",
                name: self.name.clone(),
                available: function_names().join(", "),
            })?;
        (entry.build)(self, domain)
    }
}

struct FunctionEntry {
    name: &'static str,
    build: fn(&FunctionConfig, &Domain) -> Result<Box<dyn TestFunction>>,
}

fn trig(cfg: &FunctionConfig, domain: &Domain, cosine: bool) -> Result<Box<dyn TestFunction>> {
    let modes = cfg.modes.clone().unwrap_or_else(|| vec![1; domain.dim()]);
    if modes.len() != domain.dim() {
        return Err(Error::InvalidConfig(format!(
            "{} needs {} modes, got {}",
            cfg.name,
            domain.dim(),
            modes.len()
        )));
    }
    let (lo, len) = bounding_box(domain);
    Ok(Box::new(TrigProduct {
        cosine,
        modes,
        lo,
        len,
    }))
}

fn coordinate(domain: &Domain, axis: usize) -> Result<Box<dyn TestFunction>> {
    if axis >= domain.dim() {
        return Err(Error::InvalidConfig(format!(
            "coordinate {axis} does not exist on a {}D domain",
            domain.dim()
        )));
    }
    let (lo, len) = bounding_box(domain);
    let bound = lo[axis].abs().max((lo[axis] + len[axis]).abs());
    Ok(Box::new(Coordinate { axis, bound }))
}

const FUNCTIONS: &[FunctionEntry] = &[
    FunctionEntry {
        name: "one",
        build: |_, _| Ok(Box::new(Constant(1.0))),
    },
    FunctionEntry {
        name: "zero",
        build: |_, _| Ok(Box::new(Constant(0.0))),
    },
    FunctionEntry {
        name: "constant",
        build: |cfg, _| match cfg.value {
            Some(v) if v.is_finite() => Ok(Box::new(Constant(v))),
            _ => Err(Error::InvalidConfig(
                "constant needs a finite `value`".into(),
            )),
        },
    },
    FunctionEntry {
        name: "x",
        build: |_, d| coordinate(d, 0),
    },
    FunctionEntry {
        name: "y",
        build: |_, d| coordinate(d, 1),
    },
    FunctionEntry {
        name: "sin-product",
        build: |cfg, d| trig(cfg, d, false),
    },
    FunctionEntry {
        name: "cos-product",
        build: |cfg, d| trig(cfg, d, true),
    },
    FunctionEntry {
        name: "radial-bump",
        build: |cfg, d| {
            let width = cfg.width.unwrap_or(0.5);
            if !(width.is_finite() && width > 0.0) {
                return Err(Error::InvalidConfig("radial-bump needs width > 0".into()));
            }
            Ok(Box::new(RadialBump {
                center: d.center(),
                width,
            }))
        },
    },
];

pub fn function_names() -> Vec<&'static str> {
    FUNCTIONS.iter().map(|e| e.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_respects_its_bound() {
        for d in [
            Domain::unit_interval(),
            Domain::unit_square(),
            Domain::unit_disk(),
        ] {
            for name in function_names() {
                let mut cfg = FunctionConfig::named(name);
                cfg.value = Some(-2.5);
                match cfg.build(&d) {
                    Ok(f) => assert!(check_sup_bound(f.as_ref(), &d, 41), "{name} on {d:?}"),
                    Err(_) => assert!(name == "y" && d.dim() == 1),
                }
            }
        }
    }

    #[test]
    fn detects_a_lying_bound() {
        let f = FnFunction::new("2x", 1.0, |p| 2.0 * p.x);
        assert!(!check_sup_bound(&f, &Domain::unit_interval(), 11));
    }

    #[test]
    fn unknown_function_lists_registry() {
        let err = FunctionConfig::named("bessel")
            .build(&Domain::unit_disk())
            .unwrap_err();
        assert!(err.to_string().contains("radial-bump"));
    }

    #[test]
    fn sine_product_vanishes_on_box_boundary() {
        let f = FunctionConfig::named("sin-product")
            .build(&Domain::unit_square())
            .unwrap();
        assert!(f.eval(Point::new(0.0, 0.3)).abs() < 1e-15);
        assert!((f.eval(Point::new(0.5, 0.5)) - 1.0).abs() < 1e-15);
    }
}
