use crate::error::{Error, Result};
use crate::estimators::TestFunction;
use crate::geometry::{Domain, Point};

use super::tridiag::Tridiag;
use super::{Bc, FdProblem, FdSolution, Grid};

/// Solves `alpha u - 1/2 (u'' + u'/r) = f(r)` on `[0, R]` for a radial `f`,
/// with `u'(0) = 0` and `u'(R) + beta u(R) = 0` (outward derivative).
///
/// `f` is sampled along the ray from the center in the `+x` direction.
pub fn disk_radial_elliptic(
    domain: &Domain,
    alpha: f64,
    bc: Bc,
    f: &dyn TestFunction,
    m_nodes: usize,
) -> Result<FdSolution> {
    let Domain::Disk { center, radius } = *domain else {
        return Err(Error::Unsupported(format!(
            "radial oracle needs a disk, got a {}",
            domain.name()
        )));
    };
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be > 0, got {alpha}"
        )));
    }
    if m_nodes < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 nodes, got {m_nodes}"
        )));
    }
    bc.validate()?;
    let m = m_nodes;
    let dr = radius / (m - 1) as f64;
    let h2 = dr * dr;
    let r: Vec<f64> = (0..m)
        .map(|i| if i == m - 1 { radius } else { dr * i as f64 })
        .collect();
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs: Vec<f64> = r
        .iter()
        .map(|&ri| f.eval(center + Point::new(ri, 0.0)))
        .collect();
    // the Laplacian at the origin is 2 u'' with u_{-1} = u_1
    diag[0] = alpha + 2.0 / h2;
    upper[0] = -2.0 / h2;
    for i in 1..m - 1 {
        let adv = 1.0 / (4.0 * r[i] * dr);
        lower[i] = -0.5 / h2 + adv;
        diag[i] = alpha + 1.0 / h2;
        upper[i] = -0.5 / h2 - adv;
    }
    match bc {
        // u_m = u_{m-2} - 2 dr beta u_{m-1}
        Bc::Robin { beta } => {
            lower[m - 1] = -1.0 / h2;
            diag[m - 1] = alpha + 1.0 / h2 + beta / dr + beta / (2.0 * radius);
        }
        Bc::Dirichlet => {
            diag[m - 1] = 1.0;
            rhs[m - 1] = 0.0;
        }
    }
    Tridiag::factor(&lower, &diag, &upper)?.solve_in_place(&mut rhs);
    Ok(FdSolution::new(
        FdProblem::Elliptic { alpha },
        Grid::Radial { center, r },
        rhs,
        vec![bc],
    ))
}
