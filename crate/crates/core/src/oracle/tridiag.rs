use crate::error::{Error, Result};

/// LU factors of a tridiagonal matrix without pivoting (Thomas algorithm).
/// Every matrix built by the oracles is diagonally dominant, so no pivoting is
/// needed.
#[derive(Debug, Clone)]
pub struct Tridiag {
    lower: Vec<f64>,
    /// `1 / u_ii` of the upper factor.
    inv_pivot: Vec<f64>,
    upper: Vec<f64>,
}

impl Tridiag {
    /// `lower[0]` and `upper[n - 1]` are ignored.
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        assert!(lower.len() == n && upper.len() == n, "band lengths differ");
        let mut l = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut pivot = diag[0];
        for i in 0..n {
            if i > 0 {
                l[i] = lower[i] * inv_pivot[i - 1];
                pivot = diag[i] - l[i] * upper[i - 1];
            }
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Singular(i));
            }
            inv_pivot[i] = 1.0 / pivot;
        }
        Ok(Self {
            lower: l,
            inv_pivot,
            upper: upper.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        for i in 1..n {
            rhs[i] -= self.lower[i] * rhs[i - 1];
        }
        rhs[n - 1] *= self.inv_pivot[n - 1];
        for i in (0..n - 1).rev() {
            rhs[i] = (rhs[i] - self.upper[i] * rhs[i + 1]) * self.inv_pivot[i];
        }
    }
}

pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let lu = Tridiag::factor(lower, diag, upper)?;
    let mut x = rhs.to_vec();
    lu.solve_in_place(&mut x);
    Ok(x)
}
