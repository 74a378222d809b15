use crate::error::{Error, Result};
use crate::estimators::TestFunction;
use crate::geometry::{Domain, Point};

use super::fd1d::{time_steps, Line, Propagator, RANNACHER_STEPS};
use super::{Bc, FdProblem, FdSolution, Grid};

/// Applies `op` to every row (`axis = 0`) or column (`axis = 1`) of the
/// `nx * ny` field stored x-fastest.
fn along(u: &mut [f64], nx: usize, ny: usize, axis: usize, mut op: impl FnMut(&mut [f64])) {
    if axis == 0 {
        for row in u.chunks_exact_mut(nx) {
            op(row);
        }
    } else {
        let mut col = vec![0.0; ny];
        for i in 0..nx {
            for (j, c) in col.iter_mut().enumerate() {
                *c = u[i + nx * j];
            }
            op(&mut col);
            for (j, c) in col.iter().enumerate() {
                u[i + nx * j] = *c;
            }
        }
    }
}

/// Evolves `u_t = 1/2 (u_xx + u_yy)` on a rectangle from `u(0) = f` with
/// Peaceman-Rachford ADI. `bc` is ordered left, right, bottom, top.
///
/// The x and y operators commute, so a step equals the tensor product of the
/// two 1D Crank-Nicolson steps; separable data therefore reproduce products
/// of 1D solutions up to rounding.
pub fn fd_parabolic_rect(
    domain: &Domain,
    t: f64,
    bc: [Bc; 4],
    f: &dyn TestFunction,
    nodes: (usize, usize),
    dt: f64,
) -> Result<FdSolution> {
    let Domain::Rectangle { x0, x1, y0, y1 } = *domain else {
        return Err(Error::Unsupported(format!(
            "rectangle oracle needs a rectangle, got a {}",
            domain.name()
        )));
    };
    let (n, dt_eff) = time_steps(t, dt)?;
    let (nx, ny) = nodes;
    let xl = Line::new(x0, x1, nx, [bc[0], bc[1]])?;
    let yl = Line::new(y0, y1, ny, [bc[2], bc[3]])?;
    let xs = xl.nodes();
    let ys = yl.nodes();
    let mut u: Vec<f64> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Point::new(x, y)))
        .map(|p| f.eval(p))
        .collect();
    if t > 0.0 {
        let px = Propagator::new(xl, dt_eff)?;
        let py = Propagator::new(yl, dt_eff)?;
        let mut sx = vec![0.0; nx];
        let mut sy = vec![0.0; ny];
        let start = n.min(RANNACHER_STEPS);
        for _ in 0..2 * start {
            along(&mut u, nx, ny, 0, |r| px.implicit_half(r));
            along(&mut u, nx, ny, 1, |c| py.implicit_half(c));
        }
        for _ in start..n {
            along(&mut u, nx, ny, 1, |c| py.explicit_half(c, &mut sy));
            along(&mut u, nx, ny, 0, |r| px.implicit_half(r));
            along(&mut u, nx, ny, 0, |r| px.explicit_half(r, &mut sx));
            along(&mut u, nx, ny, 1, |c| py.implicit_half(c));
        }
    }
    Ok(FdSolution::new(
        FdProblem::Parabolic { t, dt: dt_eff },
        Grid::Plane { x: xs, y: ys },
        u,
        bc.to_vec(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{Constant, FnFunction};
    use crate::oracle::closed_form::dirichlet_heat_series;
    use crate::oracle::fd1d::fd_parabolic_1d;
    use crate::oracle::observed_order;

    #[test]
    fn neumann_box_conserves_constants() {
        let s = fd_parabolic_rect(
            &Domain::unit_square(),
            0.3,
            [Bc::neumann(); 4],
            &Constant(1.0),
            (11, 13),
            0.01,
        )
        .unwrap();
        assert!(s.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn separable_data_give_products_of_line_solutions() {
        let d = Domain::rectangle(0.0, 1.0, 0.0, 2.0).unwrap();
        let g = |x: f64| 1.0 + x * x;
        let hy = |y: f64| (y / 2.0).cos();
        let f = FnFunction::new("g h", 2.0, move |p| g(p.x) * hy(p.y));
        let bx = [Bc::robin(1.0), Bc::robin(3.0)];
        let by = [Bc::neumann(), Bc::neumann()];
        let (t, dt) = (0.15, 2e-3);
        let s = fd_parabolic_rect(&d, t, [bx[0], bx[1], by[0], by[1]], &f, (41, 61), dt).unwrap();
        let fg = FnFunction::new("g", 2.0, move |p| g(p.x));
        let fh = FnFunction::new("h", 1.0, move |p| hy(p.x));
        let ug = fd_parabolic_1d(&Domain::unit_interval(), t, bx, &fg, 41, dt).unwrap();
        let uh = fd_parabolic_1d(&Domain::interval(0.0, 2.0).unwrap(), t, by, &fh, 61, dt).unwrap();
        let mut worst = 0.0f64;
        for j in 0..61 {
            for i in 0..41 {
                worst = worst.max((s.values[i + 41 * j] - ug.values[i] * uh.values[j]).abs());
            }
        }
        assert!(worst < 1e-6, "{worst}");
        assert!(worst < 1e-13, "exact up to rounding, got {worst}");
    }

    #[test]
    fn dirichlet_box_center_is_square_of_line_value() {
        let s = fd_parabolic_rect(
            &Domain::unit_square(),
            0.1,
            [Bc::Dirichlet; 4],
            &Constant(1.0),
            (201, 201),
            1e-3,
        )
        .unwrap();
        let line = dirichlet_heat_series(0.1, 0.5);
        assert!((s.value_at(Point::new(0.5, 0.5)) - line * line).abs() < 1e-5);
    }

    #[test]
    fn robin_box_is_second_order() {
        let d = Domain::unit_square();
        let f = FnFunction::new("bump", 1.0, |p| {
            (std::f64::consts::PI * (p.x - 0.5)).cos() * (1.0 - 0.5 * p.y * p.y)
        });
        let bc = [
            Bc::robin(1.0),
            Bc::robin(2.0),
            Bc::robin(0.5),
            Bc::Dirichlet,
        ];
        let at = |m: usize, dt: f64| {
            fd_parabolic_rect(&d, 0.1, bc, &f, (m, m), dt)
                .unwrap()
                .value_at(Point::new(0.25, 0.5))
        };
        let (u1, u2, u3) = (at(21, 4e-3), at(41, 2e-3), at(81, 1e-3));
        assert!(observed_order((u1 - u2).abs(), (u2 - u3).abs(), 2.0) >= 1.9);
    }

    #[test]
    fn rejects_other_domains() {
        let one = Constant(1.0);
        assert!(fd_parabolic_rect(
            &Domain::unit_interval(),
            0.1,
            [Bc::neumann(); 4],
            &one,
            (5, 5),
            0.1
        )
        .is_err());
    }
}
