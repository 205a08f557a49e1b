use std::num::NonZeroUsize;

use faer::c64;
use gauss_quad::legendre::GaussLegendre;

use super::modes::{mode_function_dl, mode_function_unchecked};
use crate::error::{Error, Result};

/// Dimensionless coupling `K_mn = M_mn l / l_dot`:
/// `(-1)^(m-n) (m+n+1) / (2 (m-n))` off the diagonal, zero on it.
pub fn coupling_element(m: i64, n: i64) -> f64 {
    if m == n {
        return 0.0;
    }
    let diff = m - n;
    let sign = if diff.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * (m + n + 1) as f64 / (2.0 * diff as f64)
}

/// Nodes per Gauss-Legendre panel.
const PANEL_ORDER: usize = 16;
const MAX_DOUBLINGS: u32 = 8;

/// Integrates `M_mn = 1/2 int (psi_m^dag psi_n' - psi_m'^dag psi_n) dx` over
/// the box with `psi' = l_dot d psi / d l`, and returns it in units of
/// `l_dot / l` so it is directly comparable with [`coupling_element`].
///
/// `points` is the starting number of quadrature nodes; the panel count is
/// doubled until two successive estimates agree to 1e-10. If they still
/// differ by more than 1e-8 after the allowed doublings, the result is
/// rejected.
pub fn coupling_quadrature(
    m: i64,
    n: i64,
    l: f64,
    ldot: f64,
    theta0: f64,
    points: usize,
) -> Result<f64> {
    if points < 64 {
        return Err(Error::Domain(format!(
            "coupling_quadrature needs at least 64 points, got {points}"
        )));
    }
    if !(l > 0.0) {
        return Err(Error::Domain(format!("box length must be positive, got {l}")));
    }
    if ldot == 0.0 || !ldot.is_finite() {
        return Err(Error::Domain(format!(
            "wall velocity must be finite and non-zero to normalise by l_dot / l, got {ldot}"
        )));
    }

    let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).unwrap());
    let integrand = |x: f64| -> c64 {
        let pm = mode_function_unchecked(m, x, l, theta0);
        let pn = mode_function_unchecked(n, x, l, theta0);
        let dm = mode_function_dl(m, x, l, theta0);
        let dn = mode_function_dl(n, x, l, theta0);
        let a = pm[0].conj() * dn[0] + pm[1].conj() * dn[1];
        let b = dm[0].conj() * pn[0] + dm[1].conj() * pn[1];
        // (1/2)(a - b) * l_dot, then divided by l_dot / l.
        0.5 * (a - b) * l
    };
    let composite = |panels: usize| -> c64 {
        let width = l / panels as f64;
        let mut acc = c64::new(0.0, 0.0);
        for p in 0..panels {
            let (a, b) = (p as f64 * width, (p + 1) as f64 * width);
            acc += c64::new(
                rule.integrate(a, b, |x| integrand(x).re),
                rule.integrate(a, b, |x| integrand(x).im),
            );
        }
        acc
    };

    let mut panels = points.div_ceil(PANEL_ORDER);
    let mut previous = composite(panels);
    let mut last_diff = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let current = composite(panels);
        last_diff = (current - previous).norm();
        previous = current;
        if last_diff < 1e-10 {
            break;
        }
    }
    if last_diff > 1e-8 {
        return Err(Error::Convergence(format!(
            "M_({m},{n}) changed by {last_diff:.3e} on the last panel doubling"
        )));
    }
    if previous.im.abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "M_({m},{n}) has a spurious imaginary part {:.3e}",
            previous.im
        )));
    }
    Ok(previous.re)
}
