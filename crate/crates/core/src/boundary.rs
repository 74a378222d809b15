//! Robin boundary measures `mu = beta * sigma`.
//!
//! Each boundary component carries one of three regimes: Neumann (`mu = 0`),
//! Robin with a bounded nonnegative rate `beta`, or Dirichlet. Dirichlet is a
//! symbolic regime (an infinite rate on every open piece of the component)
//! rather than a large number, so paths touching it are absorbed outright.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, Domain};

/// Rate profile along a component: a constant or a piecewise-constant
/// function of the component parameter, given as `[[s_0, v_0], [s_1, v_1], ...]`
/// with `s_0 = 0` and `v_i` holding on `[s_i, s_{i+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaProfile {
    Constant(f64),
    Piecewise(Vec<(f64, f64)>),
}

impl BetaProfile {
    fn validate(&self, component: usize, length: f64) -> Result<()> {
        let bad = |msg: String| {
            Err(Error::InvalidMeasure(format!(
                "component {component}: {msg}"
            )))
        };
        match self {
            BetaProfile::Constant(b) => {
                if !(b.is_finite() && *b >= 0.0) {
                    return bad(format!("beta must be finite and nonnegative, got {b}"));
                }
            }
            BetaProfile::Piecewise(pieces) => {
                if pieces.is_empty() {
                    return bad("empty piecewise beta".into());
                }
                if pieces[0].0 != 0.0 {
                    return bad(format!("first breakpoint must be 0, got {}", pieces[0].0));
                }
                for w in pieces.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return bad("breakpoints must be strictly increasing".into());
                    }
                }
                for &(s, v) in pieces {
                    if !(v.is_finite() && v >= 0.0) {
                        return bad(format!("beta must be finite and nonnegative, got {v}"));
                    }
                    if !(s.is_finite() && s <= length) {
                        return bad(format!("breakpoint {s} beyond component length {length}"));
                    }
                }
            }
        }
        Ok(())
    }

    fn value_at(&self, s: f64) -> f64 {
        match self {
            BetaProfile::Constant(b) => *b,
            BetaProfile::Piecewise(pieces) => {
                let idx = pieces.partition_point(|&(start, _)| start <= s);
                pieces[idx.saturating_sub(1)].1
            }
        }
    }

    fn scaled(&self, c: f64) -> Self {
        match self {
            BetaProfile::Constant(b) => BetaProfile::Constant(b * c),
            BetaProfile::Piecewise(p) => {
                BetaProfile::Piecewise(p.iter().map(|&(s, v)| (s, v * c)).collect())
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            BetaProfile::Constant(_) => vec![0.0],
            BetaProfile::Piecewise(p) => p.iter().map(|&(s, _)| s).collect(),
        }
    }

    fn sup(&self) -> f64 {
        match self {
            BetaProfile::Constant(b) => *b,
            BetaProfile::Piecewise(p) => p.iter().map(|&(_, v)| v).fold(0.0, f64::max),
        }
    }

    /// `int_0^length beta ds`; the value at 0 when the component is a point.
    fn integral(&self, length: f64) -> f64 {
        match self {
            BetaProfile::Constant(b) => b * length,
            BetaProfile::Piecewise(p) => {
                let mut total = 0.0;
                for (i, &(s, v)) in p.iter().enumerate() {
                    let end = p.get(i + 1).map_or(length, |next| next.0);
                    total += v * (end - s);
                }
                total
            }
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            BetaProfile::Constant(b) => Some(*b),
            BetaProfile::Piecewise(p) => {
                let first = p.first()?.1;
                p.iter().all(|&(_, v)| v == first).then_some(first)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BoundarySpec {
    Neumann,
    Robin { beta: BetaProfile },
    Dirichlet,
}

impl BoundarySpec {
    pub fn robin(beta: f64) -> Self {
        BoundarySpec::Robin {
            beta: BetaProfile::Constant(beta),
        }
    }
}

/// Result of a rate lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaValue {
    Finite(f64),
    Dirichlet,
}

impl BetaValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            BetaValue::Finite(b) => Some(b),
            BetaValue::Dirichlet => None,
        }
    }

    /// Total order with Dirichlet above every finite rate.
    pub fn le(self, other: BetaValue) -> bool {
        match (self, other) {
            (_, BetaValue::Dirichlet) => true,
            (BetaValue::Dirichlet, BetaValue::Finite(_)) => false,
            (BetaValue::Finite(a), BetaValue::Finite(b)) => a <= b,
        }
    }
}

/// A boundary measure bound to a particular domain's components.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RobinMeasure {
    specs: Vec<BoundarySpec>,
    #[serde(skip)]
    lengths: Vec<f64>,
}

impl RobinMeasure {
    pub fn new(domain: &Domain, specs: Vec<BoundarySpec>) -> Result<Self> {
        let count = domain.num_components();
        if specs.len() != count {
            return Err(Error::InvalidMeasure(format!(
                "{} domain has {count} boundary components, got {} specs",
                domain.name(),
                specs.len()
            )));
        }
        let lengths = (0..count)
            .map(|id| domain.component_length(id))
            .collect::<Result<Vec<_>>>()?;
        for (id, spec) in specs.iter().enumerate() {
            if let BoundarySpec::Robin { beta } = spec {
                beta.validate(id, lengths[id])?;
            }
        }
        Ok(Self { specs, lengths })
    }

    pub fn uniform(domain: &Domain, spec: BoundarySpec) -> Result<Self> {
        Self::new(domain, vec![spec; domain.num_components()])
    }

    pub fn neumann(domain: &Domain) -> Self {
        Self::uniform(domain, BoundarySpec::Neumann).expect("neumann is always valid")
    }

    pub fn dirichlet(domain: &Domain) -> Self {
        Self::uniform(domain, BoundarySpec::Dirichlet).expect("dirichlet is always valid")
    }

    pub fn constant(domain: &Domain, beta: f64) -> Result<Self> {
        Self::uniform(domain, BoundarySpec::robin(beta))
    }

    pub fn specs(&self) -> &[BoundarySpec] {
        &self.specs
    }

    pub fn num_components(&self) -> usize {
        self.specs.len()
    }

    pub fn is_dirichlet(&self, component: usize) -> bool {
        matches!(self.specs.get(component), Some(BoundarySpec::Dirichlet))
    }

    pub fn has_dirichlet(&self) -> bool {
        self.specs
            .iter()
            .any(|s| matches!(s, BoundarySpec::Dirichlet))
    }

    /// `true` when no component carries a positive rate or a Dirichlet flag.
    pub fn is_neumann(&self) -> bool {
        self.specs.iter().all(|s| match s {
            BoundarySpec::Neumann => true,
            BoundarySpec::Robin { beta } => beta.sup() == 0.0,
            BoundarySpec::Dirichlet => false,
        })
    }

    /// Largest finite rate over all Robin components.
    pub fn sup_beta(&self) -> f64 {
        self.specs
            .iter()
            .map(|s| match s {
                BoundarySpec::Robin { beta } => beta.sup(),
                _ => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// `mu(boundary) = int beta dsigma`, or `None` with a Dirichlet component.
    pub fn total_mass(&self, domain: &Domain) -> Option<f64> {
        let mut total = 0.0;
        for (id, spec) in self.specs.iter().enumerate() {
            let sigma = domain.surface_measure_total(id).ok()?;
            let length = self.lengths[id];
            total += match spec {
                BoundarySpec::Neumann => 0.0,
                BoundarySpec::Robin { beta } if length == 0.0 => beta.value_at(0.0) * sigma,
                BoundarySpec::Robin { beta } => beta.integral(length) * sigma / length,
                BoundarySpec::Dirichlet => return None,
            };
        }
        Some(total)
    }

    /// Constant regime of a component, if it has one.
    pub fn constant_value(&self, component: usize) -> Option<BetaValue> {
        match self.specs.get(component)? {
            BoundarySpec::Neumann => Some(BetaValue::Finite(0.0)),
            BoundarySpec::Robin { beta } => beta.as_constant().map(BetaValue::Finite),
            BoundarySpec::Dirichlet => Some(BetaValue::Dirichlet),
        }
    }

    pub fn beta_at(&self, bp: &BoundaryPoint) -> Result<BetaValue> {
        let id = bp.component;
        let spec = self.specs.get(id).ok_or(Error::UnknownComponent {
            id,
            count: self.specs.len(),
        })?;
        let length = self.lengths[id];
        let tol = 1e-12 * length.max(1.0);
        if !(bp.parameter >= -tol && bp.parameter <= length + tol) {
            return Err(Error::ParameterOutOfRange {
                component: id,
                param: bp.parameter,
                length,
            });
        }
        Ok(match spec {
            BoundarySpec::Neumann => BetaValue::Finite(0.0),
            BoundarySpec::Robin { beta } => BetaValue::Finite(beta.value_at(bp.parameter)),
            BoundarySpec::Dirichlet => BetaValue::Dirichlet,
        })
    }

    /// Multiplies every rate by `c`. `c = 0` gives the Neumann measure on every
    /// component; Dirichlet components stay Dirichlet for `c > 0`.
    pub fn scale(&self, c: f64) -> Self {
        assert!(
            c.is_finite() && c >= 0.0,
            "scale factor must be finite and nonnegative, got {c}"
        );
        let specs = self
            .specs
            .iter()
            .map(|s| match s {
                _ if c == 0.0 => BoundarySpec::Neumann,
                BoundarySpec::Neumann => BoundarySpec::Neumann,
                BoundarySpec::Robin { beta } => BoundarySpec::Robin {
                    beta: beta.scaled(c),
                },
                BoundarySpec::Dirichlet => BoundarySpec::Dirichlet,
            })
            .collect();
        Self {
            specs,
            lengths: self.lengths.clone(),
        }
    }

    /// Pointwise order `self <= other` with Dirichlet dominating every rate.
    pub fn is_dominated_by(&self, other: &RobinMeasure) -> bool {
        if self.specs.len() != other.specs.len() {
            return false;
        }
        self.specs
            .iter()
            .zip(&other.specs)
            .all(|(mine, theirs)| match (mine, theirs) {
                (_, BoundarySpec::Dirichlet) => true,
                (BoundarySpec::Dirichlet, _) => false,
                (BoundarySpec::Neumann, _) => true,
                (BoundarySpec::Robin { beta }, BoundarySpec::Neumann) => beta.sup() == 0.0,
                (BoundarySpec::Robin { beta: a }, BoundarySpec::Robin { beta: b }) => {
                    let mut points = a.breakpoints();
                    points.extend(b.breakpoints());
                    points.iter().all(|&s| a.value_at(s) <= b.value_at(s))
                }
            })
    }
}
