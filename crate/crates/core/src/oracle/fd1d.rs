use crate::error::{Error, Result};
use crate::estimators::TestFunction;
use crate::geometry::{Domain, Point};

use super::tridiag::Tridiag;
use super::{Bc, FdProblem, FdSolution, Grid};

/// `-1/2 d^2/dx^2` on a uniform grid, with the ghost-node closure at Robin
/// ends. Rows of Dirichlet ends are flagged `fixed` and hold the value 0.
#[derive(Debug, Clone)]
pub(crate) struct Line {
    pub a: f64,
    pub dx: f64,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    fixed: [bool; 2],
}

impl Line {
    pub fn new(a: f64, b: f64, m: usize, bc: [Bc; 2]) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidArgument(format!(
                "need at least 3 nodes, got {m}"
            )));
        }
        for c in bc {
            c.validate()?;
        }
        let dx = (b - a) / (m - 1) as f64;
        let h2 = dx * dx;
        let mut lower = vec![-0.5 / h2; m];
        let mut diag = vec![1.0 / h2; m];
        let mut upper = vec![-0.5 / h2; m];
        lower[0] = 0.0;
        upper[m - 1] = 0.0;
        let mut fixed = [false; 2];
        for (end, c) in bc.into_iter().enumerate() {
            let (row, inward) = if end == 0 { (0, 1) } else { (m - 1, m - 2) };
            match c {
                // u_ghost = u_inward - 2 dx beta u_row
                Bc::Robin { beta } => {
                    diag[row] = 1.0 / h2 + beta / dx;
                    if inward > row {
                        upper[row] = -1.0 / h2;
                    } else {
                        lower[row] = -1.0 / h2;
                    }
                }
                Bc::Dirichlet => {
                    fixed[end] = true;
                    diag[row] = 0.0;
                    lower[row] = 0.0;
                    upper[row] = 0.0;
                }
            }
        }
        Ok(Self {
            a,
            dx,
            lower,
            diag,
            upper,
            fixed,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn nodes(&self) -> Vec<f64> {
        let m = self.len();
        (0..m)
            .map(|i| {
                if i == m - 1 {
                    self.a + self.dx * (m - 1) as f64
                } else {
                    self.a + self.dx * i as f64
                }
            })
            .collect()
    }

    fn is_fixed(&self, i: usize) -> bool {
        (i == 0 && self.fixed[0]) || (i == self.len() - 1 && self.fixed[1])
    }

    /// Factors `c I + d A` with identity rows at fixed nodes.
    pub fn shifted(&self, c: f64, d: f64) -> Result<Tridiag> {
        let m = self.len();
        let mut lo = vec![0.0; m];
        let mut di = vec![1.0; m];
        let mut up = vec![0.0; m];
        for i in 0..m {
            if !self.is_fixed(i) {
                lo[i] = d * self.lower[i];
                di[i] = c + d * self.diag[i];
                up[i] = d * self.upper[i];
            }
        }
        Tridiag::factor(&lo, &di, &up)
    }

    /// `out = u - d A u`, zero at fixed nodes.
    pub fn explicit(&self, d: f64, u: &[f64], out: &mut [f64]) {
        let m = self.len();
        for i in 0..m {
            if self.is_fixed(i) {
                out[i] = 0.0;
                continue;
            }
            let mut au = self.diag[i] * u[i];
            if i > 0 {
                au += self.lower[i] * u[i - 1];
            }
            if i + 1 < m {
                au += self.upper[i] * u[i + 1];
            }
            out[i] = u[i] - d * au;
        }
    }

    pub fn zero_fixed(&self, u: &mut [f64]) {
        if self.fixed[0] {
            u[0] = 0.0;
        }
        if self.fixed[1] {
            let m = self.len();
            u[m - 1] = 0.0;
        }
    }
}

/// One time step of `u_t = 1/2 u''` on a line: Crank-Nicolson, plus the
/// backward Euler half step used to damp nonsmooth initial data.
#[derive(Debug, Clone)]
pub(crate) struct Propagator {
    pub line: Line,
    dt: f64,
    /// `I + dt/2 A` is both the Crank-Nicolson left side and one backward
    /// Euler step of length `dt/2`.
    implicit: Tridiag,
}

impl Propagator {
    pub fn new(line: Line, dt: f64) -> Result<Self> {
        let implicit = line.shifted(1.0, 0.5 * dt)?;
        Ok(Self { line, dt, implicit })
    }

    /// `u <- (I - dt/2 A) u`.
    pub fn explicit_half(&self, u: &mut [f64], scratch: &mut [f64]) {
        self.line.explicit(0.5 * self.dt, u, scratch);
        u.copy_from_slice(scratch);
    }

    /// `u <- (I + dt/2 A)^{-1} u`.
    pub fn implicit_half(&self, u: &mut [f64]) {
        self.line.zero_fixed(u);
        self.implicit.solve_in_place(u);
    }

    pub fn crank_nicolson(&self, u: &mut [f64], scratch: &mut [f64]) {
        self.explicit_half(u, scratch);
        self.implicit_half(u);
    }
}

/// Number of full steps of length `dt_eff <= dt` reaching `t`.
pub(crate) fn time_steps(t: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time must be >= 0, got {t}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    let n = ((t / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((n, t / n as f64))
}

/// The first `RANNACHER_STEPS` steps are replaced by two backward Euler half
/// steps each.
pub(crate) const RANNACHER_STEPS: usize = 2;

fn interval_ends(domain: &Domain) -> Result<(f64, f64)> {
    match *domain {
        Domain::Interval { a, b } => Ok((a, b)),
        _ => Err(Error::Unsupported(format!(
            "1D oracle needs an interval, got a {}",
            domain.name()
        ))),
    }
}

/// Solves `alpha u - 1/2 u'' = f` with `bc = [left, right]`.
pub fn fd_elliptic_1d(
    domain: &Domain,
    alpha: f64,
    bc: [Bc; 2],
    f: &dyn TestFunction,
    m_nodes: usize,
) -> Result<FdSolution> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be > 0, got {alpha}"
        )));
    }
    let (a, b) = interval_ends(domain)?;
    let line = Line::new(a, b, m_nodes, bc)?;
    let nodes = line.nodes();
    let mut u: Vec<f64> = nodes.iter().map(|&x| f.eval(Point::on_line(x))).collect();
    line.zero_fixed(&mut u);
    line.shifted(alpha, 1.0)?.solve_in_place(&mut u);
    Ok(FdSolution::new(
        FdProblem::Elliptic { alpha },
        Grid::Line { nodes },
        u,
        bc.to_vec(),
    ))
}

/// Evolves `u_t = 1/2 u''` from `u(0) = f` to time `t`.
pub fn fd_parabolic_1d(
    domain: &Domain,
    t: f64,
    bc: [Bc; 2],
    f: &dyn TestFunction,
    m_nodes: usize,
    dt: f64,
) -> Result<FdSolution> {
    let (a, b) = interval_ends(domain)?;
    let (n, dt_eff) = time_steps(t, dt)?;
    let line = Line::new(a, b, m_nodes, bc)?;
    let nodes = line.nodes();
    let mut u: Vec<f64> = nodes.iter().map(|&x| f.eval(Point::on_line(x))).collect();
    if t > 0.0 {
        let prop = Propagator::new(line, dt_eff)?;
        let mut scratch = vec![0.0; u.len()];
        let start = n.min(RANNACHER_STEPS);
        for _ in 0..2 * start {
            prop.implicit_half(&mut u);
        }
        for _ in start..n {
            prop.crank_nicolson(&mut u, &mut scratch);
        }
    }
    Ok(FdSolution::new(
        FdProblem::Parabolic { t, dt: dt_eff },
        Grid::Line { nodes },
        u,
        bc.to_vec(),
    ))
}
