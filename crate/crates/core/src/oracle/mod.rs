//! Deterministic reference solvers: finite differences with ghost-node Robin
//! closures and closed-form series, for `u_t = 1/2 Laplacian u` and
//! `alpha u - 1/2 Laplacian u = f` with `du/dn_out + beta u = 0`.
//!
//! Every solution carries the `half-laplacian` tag; comparisons between
//! solutions refuse mismatched tags.

pub mod closed_form;
mod disk;
mod fd1d;
mod rect;
mod reference;
mod tridiag;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boundary::{BetaValue, RobinMeasure};
use crate::error::{Error, Result};
use crate::estimators::FnFunction;
use crate::geometry::{Domain, Point};

pub use disk::disk_radial_elliptic;
pub use fd1d::{fd_elliptic_1d, fd_parabolic_1d};
pub use rect::fd_parabolic_rect;
pub use reference::{resolvent_reference, semigroup_reference, OracleConfig};
pub use tridiag::{solve_tridiagonal, Tridiag};

pub const CONVENTION: &str = "half-laplacian";

/// Boundary condition of one component; `Robin { beta: 0 }` is Neumann.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Bc {
    Robin { beta: f64 },
    Dirichlet,
}

impl Bc {
    pub fn neumann() -> Self {
        Bc::Robin { beta: 0.0 }
    }

    pub fn robin(beta: f64) -> Self {
        Bc::Robin { beta }
    }

    pub fn validate(self) -> Result<()> {
        match self {
            Bc::Robin { beta } if !(beta.is_finite() && beta >= 0.0) => {
                Err(Error::InvalidArgument(format!(
                    "Robin coefficient must be finite and >= 0, got {beta}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// The condition of `component`, which must carry a constant coefficient.
    pub fn from_measure(measure: &RobinMeasure, component: usize) -> Result<Self> {
        match measure.constant_value(component) {
            Some(BetaValue::Finite(beta)) => Ok(Bc::Robin { beta }),
            Some(BetaValue::Dirichlet) => Ok(Bc::Dirichlet),
            None => Err(Error::Unsupported(format!(
                "oracles need a constant coefficient on component {component}"
            ))),
        }
    }

    /// One condition per component of `domain`, in component order.
    pub fn all_from_measure(domain: &Domain, measure: &RobinMeasure) -> Result<Vec<Self>> {
        if measure.num_components() != domain.num_components() {
            return Err(Error::InvalidMeasure(format!(
                "{} components in the measure, {} in the domain",
                measure.num_components(),
                domain.num_components()
            )));
        }
        (0..domain.num_components())
            .map(|c| Self::from_measure(measure, c))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FdProblem {
    Elliptic { alpha: f64 },
    Parabolic { t: f64, dt: f64 },
}

/// Nodes of a solution. Plane values are stored x-fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Grid {
    Line { nodes: Vec<f64> },
    Plane { x: Vec<f64>, y: Vec<f64> },
    Radial { center: Point, r: Vec<f64> },
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::Line { nodes } => nodes.len(),
            Grid::Plane { x, y } => x.len() * y.len(),
            Grid::Radial { r, .. } => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn line_nodes(&self) -> Option<&[f64]> {
        match self {
            Grid::Line { nodes } => Some(nodes),
            _ => None,
        }
    }

    /// Node `k` as a point in the plane; radial nodes lie on the `+x` ray.
    pub fn point(&self, k: usize) -> Point {
        match self {
            Grid::Line { nodes } => Point::on_line(nodes[k]),
            Grid::Plane { x, y } => Point::new(x[k % x.len()], y[k / x.len()]),
            Grid::Radial { center, r } => *center + Point::new(r[k], 0.0),
        }
    }

    /// Spacing per axis.
    pub fn spacing(&self) -> Vec<f64> {
        let step = |v: &[f64]| (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
        match self {
            Grid::Line { nodes } => vec![step(nodes)],
            Grid::Plane { x, y } => vec![step(x), step(y)],
            Grid::Radial { r, .. } => vec![step(r)],
        }
    }
}

/// Cell index and weight of `s` on a uniform axis, clamped to its ends.
fn locate(axis: &[f64], s: f64) -> (usize, f64) {
    let n = axis.len();
    let d = (axis[n - 1] - axis[0]) / (n - 1) as f64;
    let pos = ((s - axis[0]) / d).clamp(0.0, (n - 1) as f64);
    let i = (pos.floor() as usize).min(n - 2);
    (i, pos - i as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdSolution {
    pub convention: String,
    pub problem: FdProblem,
    pub grid: Grid,
    pub values: Vec<f64>,
    /// One condition per boundary component, in component order.
    pub bc: Vec<Bc>,
}

impl FdSolution {
    pub(crate) fn new(problem: FdProblem, grid: Grid, values: Vec<f64>, bc: Vec<Bc>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self {
            convention: CONVENTION.to_string(),
            problem,
            grid,
            values,
            bc,
        }
    }

    /// Piecewise linear (bilinear in the plane) interpolation; points outside
    /// the grid are clamped to it.
    pub fn value_at(&self, p: Point) -> f64 {
        let lerp = |v: &[f64], i: usize, w: f64| {
            if w == 0.0 {
                v[i]
            } else {
                (1.0 - w) * v[i] + w * v[i + 1]
            }
        };
        match &self.grid {
            Grid::Line { nodes } => {
                let (i, w) = locate(nodes, p.x);
                lerp(&self.values, i, w)
            }
            Grid::Radial { center, r } => {
                let (i, w) = locate(r, (p - *center).norm());
                lerp(&self.values, i, w)
            }
            Grid::Plane { x, y } => {
                let nx = x.len();
                let (i, wx) = locate(x, p.x);
                let (j, wy) = locate(y, p.y);
                let lo = lerp(&self.values[nx * j..], i, wx);
                if wy == 0.0 {
                    lo
                } else {
                    let hi = lerp(&self.values[nx * (j + 1)..], i, wx);
                    (1.0 - wy) * lo + wy * hi
                }
            }
        }
    }

    pub fn check_convention(&self, other: &FdSolution) -> Result<()> {
        if self.convention != other.convention {
            return Err(Error::InvalidArgument(format!(
                "convention mismatch: {} vs {}",
                self.convention, other.convention
            )));
        }
        Ok(())
    }

    /// `max_k |self(node_k) - other(node_k)|` over the nodes of `self`, with
    /// `other` interpolated; grids need not match.
    pub fn max_norm_diff(&self, other: &FdSolution) -> Result<f64> {
        self.check_convention(other)?;
        Ok((0..self.values.len())
            .map(|k| (self.values[k] - other.value_at(self.grid.point(k))).abs())
            .fold(0.0, f64::max))
    }

    /// `|self(p) - value|`.
    pub fn point_diff(&self, p: Point, value: f64) -> f64 {
        (self.value_at(p) - value).abs()
    }

    /// Whether the recorded conditions are those of `measure`.
    pub fn matches(&self, measure: &RobinMeasure) -> bool {
        measure.num_components() == self.bc.len()
            && (0..self.bc.len()).all(|c| Bc::from_measure(measure, c).ok() == Some(self.bc[c]))
    }

    /// The interpolant as a test function, e.g. to feed an oracle solution
    /// back into an estimator.
    pub fn to_function(&self, label: &str) -> FnFunction {
        let sol = self.clone();
        let bound = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        FnFunction::new(label, bound, move |p| sol.value_at(p))
    }

    /// Rows `x,value`, `x,y,value` or `r,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match &self.grid {
            Grid::Line { nodes } => {
                w.write_record(["x", "value"])?;
                for (x, v) in nodes.iter().zip(&self.values) {
                    w.write_record([x.to_string(), v.to_string()])?;
                }
            }
            Grid::Plane { x, y } => {
                w.write_record(["x", "y", "value"])?;
                for (k, v) in self.values.iter().enumerate() {
                    w.write_record([
                        x[k % x.len()].to_string(),
                        y[k / x.len()].to_string(),
                        v.to_string(),
                    ])?;
                }
            }
            Grid::Radial { r, .. } => {
                w.write_record(["r", "value"])?;
                for (ri, v) in r.iter().zip(&self.values) {
                    w.write_record([ri.to_string(), v.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// `log(e_coarse / e_fine) / log(ratio)` for errors on grids refined by `ratio`.
pub fn observed_order(e_coarse: f64, e_fine: f64, ratio: f64) -> f64 {
    (e_coarse / e_fine).ln() / ratio.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundarySpec;
    use crate::estimators::Constant;

    #[test]
    fn bc_record_follows_the_measure() {
        let d = Domain::unit_square();
        let m = RobinMeasure::new(
            &d,
            vec![
                BoundarySpec::Neumann,
                BoundarySpec::robin(2.0),
                BoundarySpec::Dirichlet,
                BoundarySpec::robin(0.5),
            ],
        )
        .unwrap();
        let bc = Bc::all_from_measure(&d, &m).unwrap();
        assert_eq!(
            bc,
            vec![Bc::neumann(), Bc::robin(2.0), Bc::Dirichlet, Bc::robin(0.5)]
        );
        let s = fd_parabolic_rect(
            &d,
            0.01,
            [bc[0], bc[1], bc[2], bc[3]],
            &Constant(1.0),
            (5, 5),
            0.01,
        )
        .unwrap();
        assert!(s.matches(&m));
        assert!(!s.matches(&RobinMeasure::neumann(&d)));
        assert!(Bc::all_from_measure(&Domain::unit_interval(), &m).is_err());
    }

    #[test]
    fn convention_mismatch_is_detected() {
        let d = Domain::unit_interval();
        let a = fd_elliptic_1d(&d, 1.0, [Bc::neumann(); 2], &Constant(1.0), 5).unwrap();
        let mut b = a.clone();
        assert_eq!(a.max_norm_diff(&b).unwrap(), 0.0);
        b.convention = "full-laplacian".into();
        assert!(a.max_norm_diff(&b).is_err());
    }

    #[test]
    fn interpolation_hits_nodes_and_is_linear_between() {
        let s = FdSolution::new(
            FdProblem::Elliptic { alpha: 1.0 },
            Grid::Plane {
                x: vec![0.0, 0.5, 1.0],
                y: vec![0.0, 1.0],
            },
            vec![0.0, 1.0, 2.0, 10.0, 11.0, 12.0],
            vec![Bc::neumann(); 4],
        );
        assert_eq!(s.value_at(Point::new(0.5, 1.0)), 11.0);
        assert!((s.value_at(Point::new(0.25, 0.5)) - 5.5).abs() < 1e-12);
        assert_eq!(s.value_at(Point::new(2.0, -1.0)), 2.0);
    }

    #[test]
    fn csv_export_has_one_row_per_node() {
        let s = fd_elliptic_1d(
            &Domain::unit_interval(),
            1.0,
            [Bc::Dirichlet; 2],
            &Constant(1.0),
            5,
        )
        .unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("x,value\n0,0\n"));
    }

    #[test]
    fn order_formula() {
        assert!((observed_order(4e-4, 1e-4, 2.0) - 2.0).abs() < 1e-12);
    }
}
