//! Exact solutions on the unit interval and the disk with constant data
//! `f = 1`, all under the `1/2 Laplacian` convention.

use std::f64::consts::PI;

/// `u(t, x)` for `u_t = 1/2 u''`, `u(0) = 1`, `u(0) = u(1) = 0`:
/// `sum_{k odd} 4/(k pi) sin(k pi x) exp(-k^2 pi^2 t / 2)`. Needs `t > 0`.
pub fn dirichlet_heat_series(t: f64, x: f64) -> f64 {
    assert!(t > 0.0, "the series needs t > 0");
    let mut sum = 0.0;
    let mut k = 1.0f64;
    loop {
        let decay = (-k * k * PI * PI * t / 2.0).exp();
        let amp = 4.0 / (k * PI) * decay;
        if amp < 1e-18 {
            break;
        }
        sum += amp * (k * PI * x).sin();
        k += 2.0;
    }
    sum
}

/// Solution of `alpha u - 1/2 u'' = 1`, `u(0) = u(1) = 0`.
pub fn dirichlet_elliptic_1d(alpha: f64, x: f64) -> f64 {
    let k = (2.0 * alpha).sqrt();
    (1.0 - (k * (x - 0.5)).cosh() / (k / 2.0).cosh()) / alpha
}

/// Solution of `alpha u - 1/2 u'' = 1`, `u'(0) = beta u(0)`,
/// `-u'(1) = beta u(1)`.
pub fn robin_elliptic_symmetric_1d(alpha: f64, beta: f64, x: f64) -> f64 {
    let k = (2.0 * alpha).sqrt();
    let c = -(beta / alpha) / (k * (k / 2.0).sinh() + beta * (k / 2.0).cosh());
    1.0 / alpha + c * (k * (x - 0.5)).cosh()
}

/// Roots of `lambda tan(lambda / 2) = beta`, one in each `(2 n pi, (2 n + 1) pi)`.
fn symmetric_robin_eigenvalues(beta: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|n| {
            let mut lo = 2.0 * n as f64 * PI;
            let mut hi = lo + PI;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid * (mid / 2.0).tan() < beta {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 4.0 * f64::EPSILON * hi {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Coefficients and eigenvalues of `1 = sum_n c_n cos(lambda_n (x - 1/2))`.
fn symmetric_robin_modes(beta: f64, count: usize) -> Vec<(f64, f64)> {
    symmetric_robin_eigenvalues(beta, count)
        .into_iter()
        .map(|l| {
            let proj = 2.0 / l * (l / 2.0).sin();
            let norm = 0.5 + l.sin() / (2.0 * l);
            (proj / norm, l)
        })
        .collect()
}

/// `u(t, x)` for `u_t = 1/2 u''`, `u(0) = 1`, with `u'(0) = beta u(0)` and
/// `-u'(1) = beta u(1)`, by expansion in the even eigenfunctions
/// `cos(lambda (x - 1/2))`. Needs `t > 0` and `beta > 0`.
pub fn robin_heat_series_symmetric(beta: f64, t: f64, x: f64) -> f64 {
    assert!(t > 0.0 && beta > 0.0);
    // lambda_n >= 2 n pi; stop once the decay is negligible
    let count = ((2.0 * 40.0 / t).sqrt() / (2.0 * PI)).ceil() as usize + 2;
    symmetric_robin_modes(beta, count)
        .into_iter()
        .map(|(c, l)| c * (l * (x - 0.5)).cos() * (-l * l * t / 2.0).exp())
        .sum()
}

/// Modified Bessel functions `(I_0(z), I_1(z))` by their power series.
pub fn bessel_i01(z: f64) -> (f64, f64) {
    let q = z * z / 4.0;
    let mut t0 = 1.0;
    let mut t1 = z / 2.0;
    let (mut i0, mut i1) = (t0, t1);
    let mut k = 1.0;
    while t0 > 1e-17 * i0 || t1 > 1e-17 * i1 {
        t0 *= q / (k * k);
        t1 *= q / (k * (k + 1.0));
        i0 += t0;
        i1 += t1;
        k += 1.0;
        if k > 500.0 {
            break;
        }
    }
    (i0, i1)
}

/// Radial solution of `alpha u - 1/2 Laplacian u = 1` on the disk of radius
/// `radius` with `u' + beta u = 0` at the rim (`beta = None` for Dirichlet).
pub fn disk_elliptic(alpha: f64, beta: Option<f64>, radius: f64, r: f64) -> f64 {
    let k = (2.0 * alpha).sqrt();
    let (i0r, i1r) = bessel_i01(k * radius);
    let c = match beta {
        Some(b) => -(b / alpha) / (k * i1r + b * i0r),
        None => -1.0 / (alpha * i0r),
    };
    1.0 / alpha + c * bessel_i01(k * r).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        let (i0, i1) = bessel_i01(1.0);
        assert!((i0 - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((i1 - 0.565_159_103_992_485).abs() < 1e-15);
        assert_eq!(bessel_i01(0.0), (1.0, 0.0));
    }

    #[test]
    fn series_limits() {
        assert!((dirichlet_heat_series(1e-4, 0.5) - 1.0).abs() < 1e-12);
        assert!(dirichlet_heat_series(0.1, 0.0).abs() < 1e-15);
        // large beta tends to Dirichlet
        let r = robin_elliptic_symmetric_1d(1.0, 1e9, 0.3);
        assert!((r - dirichlet_elliptic_1d(1.0, 0.3)).abs() < 1e-8);
        assert!((robin_elliptic_symmetric_1d(2.0, 0.0, 0.3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn robin_heat_series_starts_at_one_and_transforms_to_the_resolvent() {
        assert!((robin_heat_series_symmetric(1.0, 1e-4, 0.5) - 1.0).abs() < 1e-9);
        let l = symmetric_robin_eigenvalues(1.0, 1)[0];
        assert!((l * (l / 2.0).tan() - 1.0).abs() < 1e-12);
        // termwise Laplace transform at rate alpha gives the elliptic solution
        let alpha = 1.0;
        for x in [0.0, 0.3, 0.5] {
            let lap: f64 = symmetric_robin_modes(1.0, 4000)
                .into_iter()
                .map(|(c, l)| c * (l * (x - 0.5)).cos() / (alpha + l * l / 2.0))
                .sum();
            assert!(
                (lap - robin_elliptic_symmetric_1d(alpha, 1.0, x)).abs() < 1e-8,
                "{lap}"
            );
        }
    }

    #[test]
    fn disk_solution_satisfies_its_boundary_condition() {
        let (alpha, beta, r0) = (1.5, 0.7, 1.3);
        let u = |r: f64| disk_elliptic(alpha, Some(beta), r0, r);
        let du = (u(r0 + 1e-5) - u(r0 - 1e-5)) / 2e-5;
        assert!((du + beta * u(r0)).abs() < 1e-8);
        assert!(disk_elliptic(alpha, None, r0, r0).abs() < 1e-14);
        assert!((disk_elliptic(alpha, Some(0.0), r0, 0.2) - 1.0 / alpha).abs() < 1e-15);
    }
}
