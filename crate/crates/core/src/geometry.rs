//! Model domains and boundary geometry.
//!
//! Three convex Lipschitz domains are supported: an interval, an axis-aligned
//! rectangle and a disk. Each exposes its boundary as a small set of
//! components with stable integer ids:
//!
//! | domain    | ids | components                                  |
//! |-----------|-----|---------------------------------------------|
//! | interval  | 2   | `0` left endpoint `a`, `1` right endpoint `b` |
//! | rectangle | 4   | `0` left, `1` right, `2` bottom, `3` top     |
//! | disk      | 1   | `0` the circle                               |
//!
//! Every boundary point also carries a scalar *parameter* locating it on its
//! component: `0` for interval endpoints, the distance from the lower corner
//! along a rectangle edge, and counter-clockwise arc length from the
//! `+x` axis on the circle.
//!
//! Ties in nearest-boundary queries (rectangle corner diagonals, the disk
//! center, the interval midpoint) resolve to the lowest component id, and the
//! disk center projects along `+x`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of boundary components of any supported domain.
pub const MAX_COMPONENTS: usize = 4;

/// A point (or vector) in the plane. One-dimensional domains use `x` only and
/// keep `y == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ZERO: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub const fn on_line(x: f64) -> Self {
        Self { x, y: 0.0 }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Coordinates used by a domain of dimension `dim`.
    pub fn coords(self, dim: usize) -> Vec<f64> {
        if dim == 1 {
            vec![self.x]
        } else {
            vec![self.x, self.y]
        }
    }

    pub fn from_coords(c: &[f64]) -> Option<Self> {
        match c {
            [x] => Some(Self::on_line(*x)),
            [x, y] => Some(Self::new(*x, *y)),
            _ => None,
        }
    }
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A point of the boundary together with the component it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub position: Point,
    pub component: usize,
    /// Unit normal pointing into the domain.
    pub inward_normal: Point,
    /// Location along the component (see module docs).
    pub parameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    Disk { center: Point, radius: f64 },
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Domain::Interval { a, b }.validated()
    }

    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Domain::Rectangle { x0, x1, y0, y1 }.validated()
    }

    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        Domain::Disk { center, radius }.validated()
    }

    pub fn unit_interval() -> Self {
        Domain::Interval { a: 0.0, b: 1.0 }
    }

    pub fn unit_square() -> Self {
        Domain::Rectangle {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
        }
    }

    pub fn unit_disk() -> Self {
        Domain::Disk {
            center: Point::ZERO,
            radius: 1.0,
        }
    }

    /// Checks the construction invariants; deserialized domains must pass
    /// through here before use.
    pub fn validated(self) -> Result<Self> {
        let ok = match &self {
            Domain::Interval { a, b } => a.is_finite() && b.is_finite() && a < b,
            Domain::Rectangle { x0, x1, y0, y1 } => {
                [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x0 < x1 && y0 < y1
            }
            Domain::Disk { center, radius } => {
                center.is_finite() && radius.is_finite() && *radius > 0.0
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidDomain(format!("{self:?}")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domain::Interval { .. } => "interval",
            Domain::Rectangle { .. } => "rectangle",
            Domain::Disk { .. } => "disk",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn num_components(&self) -> usize {
        match self {
            Domain::Interval { .. } => 2,
            Domain::Rectangle { .. } => 4,
            Domain::Disk { .. } => 1,
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } => b - a,
            Domain::Rectangle { x0, x1, y0, y1 } => (x1 - x0).hypot(y1 - y0),
            Domain::Disk { radius, .. } => 2.0 * radius,
        }
    }

    /// Lebesgue measure of the domain.
    pub fn volume(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } => b - a,
            Domain::Rectangle { x0, x1, y0, y1 } => (x1 - x0) * (y1 - y0),
            Domain::Disk { radius, .. } => PI * radius * radius,
        }
    }

    /// A convenient interior reference point.
    pub fn center(&self) -> Point {
        match *self {
            Domain::Interval { a, b } => Point::on_line(0.5 * (a + b)),
            Domain::Rectangle { x0, x1, y0, y1 } => Point::new(0.5 * (x0 + x1), 0.5 * (y0 + y1)),
            Domain::Disk { center, .. } => center,
        }
    }

    /// Positive inside, zero on the boundary, negative outside.
    pub fn signed_distance(&self, p: Point) -> f64 {
        match *self {
            Domain::Interval { a, b } => (p.x - a).min(b - p.x),
            Domain::Rectangle { x0, x1, y0, y1 } => {
                let dx = (x0 - p.x).max(p.x - x1);
                let dy = (y0 - p.y).max(p.y - y1);
                if dx <= 0.0 && dy <= 0.0 {
                    -dx.max(dy)
                } else {
                    -(dx.max(0.0).hypot(dy.max(0.0)))
                }
            }
            Domain::Disk { center, radius } => radius - (p - center).norm(),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.signed_distance(p) >= 0.0
    }

    /// Signed distance from `p` to the supporting half-space (half-line, or
    /// the disk itself) of component `id`; positive on the domain side.
    pub fn component_distance(&self, p: Point, id: usize) -> f64 {
        match *self {
            Domain::Interval { a, b } => {
                if id == 0 {
                    p.x - a
                } else {
                    b - p.x
                }
            }
            Domain::Rectangle { x0, x1, y0, y1 } => match id {
                0 => p.x - x0,
                1 => x1 - p.x,
                2 => p.y - y0,
                _ => y1 - p.y,
            },
            Domain::Disk { center, radius } => radius - (p - center).norm(),
        }
    }

    /// Bit set of components whose supporting half-space strictly excludes `p`.
    pub fn violated_components(&self, p: Point) -> u8 {
        let mut mask = 0u8;
        for id in 0..self.num_components() {
            if self.component_distance(p, id) < 0.0 {
                mask |= 1 << id;
            }
        }
        mask
    }

    /// Nearest boundary point.
    pub fn project(&self, p: Point) -> BoundaryPoint {
        match *self {
            Domain::Interval { a, b } => {
                let id = if p.x > b || (p.x >= a && p.x - a > b - p.x) {
                    1
                } else {
                    0
                };
                self.boundary_point(p, id)
            }
            Domain::Rectangle { x0, x1, y0, y1 } => {
                let outside = [p.x < x0, p.x > x1, p.y < y0, p.y > y1];
                let id = if let Some(id) = outside.iter().position(|&o| o) {
                    id
                } else {
                    let d = [p.x - x0, x1 - p.x, p.y - y0, y1 - p.y];
                    let mut best = 0;
                    for id in 1..4 {
                        if d[id] < d[best] {
                            best = id;
                        }
                    }
                    best
                };
                let q = Point::new(p.x.clamp(x0, x1), p.y.clamp(y0, y1));
                self.boundary_point(q, id)
            }
            Domain::Disk { .. } => self.boundary_point(p, 0),
        }
    }

    /// Nearest point of component `id` to `p`.
    pub fn project_onto_component(&self, p: Point, id: usize) -> BoundaryPoint {
        match *self {
            Domain::Rectangle { x0, x1, y0, y1 } => {
                self.boundary_point(Point::new(p.x.clamp(x0, x1), p.y.clamp(y0, y1)), id)
            }
            _ => self.boundary_point(p, id),
        }
    }

    // Snaps `p` onto component `id`. For the rectangle `p` must already lie
    // within the edge's extent along the tangent direction.
    fn boundary_point(&self, p: Point, id: usize) -> BoundaryPoint {
        match *self {
            Domain::Interval { a, b } => {
                let (x, n) = if id == 0 { (a, 1.0) } else { (b, -1.0) };
                BoundaryPoint {
                    position: Point::on_line(x),
                    component: id,
                    inward_normal: Point::on_line(n),
                    parameter: 0.0,
                }
            }
            Domain::Rectangle { x0, x1, y0, y1 } => {
                let (position, normal, parameter) = match id {
                    0 => (Point::new(x0, p.y), Point::new(1.0, 0.0), p.y - y0),
                    1 => (Point::new(x1, p.y), Point::new(-1.0, 0.0), p.y - y0),
                    2 => (Point::new(p.x, y0), Point::new(0.0, 1.0), p.x - x0),
                    _ => (Point::new(p.x, y1), Point::new(0.0, -1.0), p.x - x0),
                };
                BoundaryPoint {
                    position,
                    component: id,
                    inward_normal: normal,
                    parameter,
                }
            }
            Domain::Disk { center, radius } => {
                let v = p - center;
                let r = v.norm();
                let dir = if r > 0.0 {
                    v * (1.0 / r)
                } else {
                    Point::new(1.0, 0.0)
                };
                let mut theta = dir.y.atan2(dir.x);
                if theta < 0.0 {
                    theta += 2.0 * PI;
                }
                // keep the rounded point inside the closed disk
                let mut reach = radius;
                let mut position = center + dir * reach;
                while radius - (position - center).norm() < 0.0 {
                    reach = reach.next_down();
                    position = center + dir * reach;
                }
                BoundaryPoint {
                    position,
                    component: 0,
                    inward_normal: -dir,
                    parameter: (radius * theta).min(2.0 * PI * radius),
                }
            }
        }
    }

    fn check_component(&self, id: usize) -> Result<()> {
        if id < self.num_components() {
            Ok(())
        } else {
            Err(Error::UnknownComponent {
                id,
                count: self.num_components(),
            })
        }
    }

    /// Total surface measure of a component: counting measure on interval
    /// endpoints, length in 2D.
    pub fn surface_measure_total(&self, id: usize) -> Result<f64> {
        self.check_component(id)?;
        Ok(match *self {
            Domain::Interval { .. } => 1.0,
            Domain::Rectangle { .. } => self.component_length(id)?,
            Domain::Disk { radius, .. } => 2.0 * PI * radius,
        })
    }

    /// Total surface measure of the whole boundary.
    pub fn boundary_measure(&self) -> f64 {
        (0..self.num_components())
            .map(|id| self.surface_measure_total(id).unwrap_or(0.0))
            .sum()
    }

    /// Range `[0, length]` of the component parameter.
    pub fn component_length(&self, id: usize) -> Result<f64> {
        self.check_component(id)?;
        Ok(match *self {
            Domain::Interval { .. } => 0.0,
            Domain::Rectangle { x0, x1, y0, y1 } => {
                if id < 2 {
                    y1 - y0
                } else {
                    x1 - x0
                }
            }
            Domain::Disk { radius, .. } => 2.0 * PI * radius,
        })
    }

    /// Reflects an outside point back into the closed domain by folding
    /// across the boundary (per coordinate for the box domains, radially for
    /// the disk).
    pub fn mirror(&self, p: Point) -> Point {
        let m = self.fold(p);
        if self.contains(m) {
            m
        } else {
            self.project(m).position
        }
    }

    fn fold(&self, p: Point) -> Point {
        fn fold(mut v: f64, lo: f64, hi: f64) -> f64 {
            for _ in 0..64 {
                if v < lo {
                    v = 2.0 * lo - v;
                } else if v > hi {
                    v = 2.0 * hi - v;
                } else {
                    return v;
                }
            }
            v.clamp(lo, hi)
        }
        match *self {
            Domain::Interval { a, b } => Point::on_line(fold(p.x, a, b)),
            Domain::Rectangle { x0, x1, y0, y1 } => {
                Point::new(fold(p.x, x0, x1), fold(p.y, y0, y1))
            }
            Domain::Disk { center, radius } => {
                let v = p - center;
                let r = v.norm();
                if r <= radius {
                    return p;
                }
                let folded = 2.0 * radius - r;
                if folded.abs() <= radius {
                    center + v * (folded / r)
                } else {
                    self.project(p).position
                }
            }
        }
    }

    /// Uniform sample from the domain.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match *self {
            Domain::Interval { a, b } => Point::on_line(a + (b - a) * rng.random::<f64>()),
            Domain::Rectangle { x0, x1, y0, y1 } => Point::new(
                x0 + (x1 - x0) * rng.random::<f64>(),
                y0 + (y1 - y0) * rng.random::<f64>(),
            ),
            Domain::Disk { center, radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                let theta = 2.0 * PI * rng.random::<f64>();
                center + Point::new(r * theta.cos(), r * theta.sin())
            }
        }
    }
}
