use serde::{Deserialize, Serialize};

use crate::boundary::RobinMeasure;
use crate::error::{Error, Result};
use crate::estimators::TestFunction;
use crate::geometry::Domain;

use super::{
    disk_radial_elliptic, fd_elliptic_1d, fd_parabolic_1d, fd_parabolic_rect, Bc, FdSolution,
};

/// Grid resolution used when an oracle is picked automatically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Nodes per axis (radial nodes on the disk).
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// Time step of the parabolic solvers.
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_nodes() -> usize {
    401
}

fn default_dt() -> f64 {
    5e-4
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            nodes: default_nodes(),
            dt: default_dt(),
        }
    }
}

/// `P_t^mu f` on the whole grid. Intervals and rectangles only.
pub fn semigroup_reference(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    t: f64,
    cfg: &OracleConfig,
) -> Result<FdSolution> {
    let bc = Bc::all_from_measure(domain, measure)?;
    match domain {
        Domain::Interval { .. } => fd_parabolic_1d(domain, t, [bc[0], bc[1]], f, cfg.nodes, cfg.dt),
        Domain::Rectangle { .. } => fd_parabolic_rect(
            domain,
            t,
            [bc[0], bc[1], bc[2], bc[3]],
            f,
            (cfg.nodes, cfg.nodes),
            cfg.dt,
        ),
        Domain::Disk { .. } => Err(Error::Unsupported("no parabolic oracle on the disk".into())),
    }
}

/// `R_alpha^A f` on the whole grid. Intervals, and the disk for radial `f`.
pub fn resolvent_reference(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    alpha: f64,
    cfg: &OracleConfig,
) -> Result<FdSolution> {
    let bc = Bc::all_from_measure(domain, measure)?;
    match domain {
        Domain::Interval { .. } => fd_elliptic_1d(domain, alpha, [bc[0], bc[1]], f, cfg.nodes),
        Domain::Disk { .. } => disk_radial_elliptic(domain, alpha, bc[0], f, cfg.nodes),
        Domain::Rectangle { .. } => Err(Error::Unsupported(
            "no elliptic oracle on the rectangle".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Constant;
    use crate::geometry::Point;
    use crate::oracle::closed_form::{dirichlet_heat_series, disk_elliptic};

    #[test]
    fn dispatches_by_domain() {
        let cfg = OracleConfig::default();
        let one = Constant(1.0);
        let i = Domain::unit_interval();
        let s = semigroup_reference(&i, &RobinMeasure::dirichlet(&i), &one, 0.1, &cfg).unwrap();
        assert!((s.value_at(Point::on_line(0.5)) - dirichlet_heat_series(0.1, 0.5)).abs() < 1e-5);
        let d = Domain::unit_disk();
        let m = RobinMeasure::constant(&d, 1.0).unwrap();
        let s = resolvent_reference(&d, &m, &one, 1.0, &cfg).unwrap();
        assert!((s.value_at(d.center()) - disk_elliptic(1.0, Some(1.0), 1.0, 0.0)).abs() < 1e-5);
        assert!(matches!(
            semigroup_reference(&d, &m, &one, 0.1, &cfg),
            Err(Error::Unsupported(_))
        ));
        let sq = Domain::unit_square();
        assert!(matches!(
            resolvent_reference(&sq, &RobinMeasure::neumann(&sq), &one, 1.0, &cfg),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn config_defaults_fill_in() {
        let c: OracleConfig = serde_json::from_str("{\"nodes\": 101}").unwrap();
        assert_eq!(c.dt, 5e-4);
        assert!(serde_json::from_str::<OracleConfig>("{\"grid\": 3}").is_err());
    }
}
