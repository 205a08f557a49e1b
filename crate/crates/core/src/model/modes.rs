use std::f64::consts::PI;

use faer::c64;

use crate::error::{Error, Result};

/// Two-component spinor.
pub type Spinor = [c64; 2];

const I: c64 = c64 { re: 0.0, im: 1.0 };

/// One-particle energy `(n + 1/2) pi v / l` (hbar = 1).
pub fn mode_frequency(n: i64, l: f64, v: f64) -> Result<f64> {
    if !(l > 0.0) || !(v > 0.0) {
        return Err(Error::Domain(format!(
            "mode_frequency needs l > 0 and v > 0, got l = {l}, v = {v}"
        )));
    }
    Ok((n as f64 + 0.5) * PI * v / l)
}

fn wavenumber(n: i64, l: f64) -> f64 {
    (n as f64 + 0.5) * PI / l
}

fn check_position(x: f64, l: f64) -> Result<()> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("box length must be positive, got {l}")));
    }
    if !(0.0..=l).contains(&x) {
        return Err(Error::Domain(format!("x = {x} lies outside the box [0, {l}]")));
    }
    Ok(())
}

/// Instantaneous eigenfunction `psi_n(x)` of `-i v gamma_5 d/dx` in a box of
/// length `l` with bag boundary phase `theta0`.
pub fn mode_function(n: i64, x: f64, l: f64, theta0: f64) -> Result<Spinor> {
    check_position(x, l)?;
    Ok(mode_function_unchecked(n, x, l, theta0))
}

pub(crate) fn mode_function_unchecked(n: i64, x: f64, l: f64, theta0: f64) -> Spinor {
    let k = wavenumber(n, l);
    let norm = 1.0 / (2.0 * l).sqrt();
    [
        c64::cis(k * x) * norm,
        I * c64::cis(theta0 - k * x) * norm,
    ]
}

/// `d psi_n / d l` at fixed `x` and mode index `n`.
pub(crate) fn mode_function_dl(n: i64, x: f64, l: f64, theta0: f64) -> Spinor {
    let k = wavenumber(n, l);
    let dk = -k / l;
    let [up, down] = mode_function_unchecked(n, x, l, theta0);
    let dnorm = -0.5 / l;
    [
        up * (dnorm + I * x * dk),
        down * (dnorm - I * x * dk),
    ]
}

/// Largest violation of the bag condition `exp(i theta gamma_5) psi =
/// i n_mu gamma^mu psi` over the two walls, with `gamma^0 = sigma_x`,
/// `gamma^1 = -i sigma_y`, `gamma_5 = sigma_z` and outward normals `n^1 = -1`
/// at `x = 0` and `n^1 = +1` at `x = l`.
pub fn bag_condition_residual(n: i64, l: f64, theta0: f64) -> f64 {
    let lhs = |psi: Spinor| [c64::cis(theta0) * psi[0], c64::cis(-theta0) * psi[1]];
    // i n_mu gamma^mu psi with n_1 = -n^1 and gamma^1 psi = (-psi_1, psi_0).
    let rhs = |psi: Spinor, n_upper: f64| {
        let n_lower = -n_upper;
        [I * n_lower * -psi[1], I * n_lower * psi[0]]
    };
    let mut worst = 0.0f64;
    for (x, n_upper) in [(0.0, -1.0), (l, 1.0)] {
        let psi = mode_function_unchecked(n, x, l, theta0);
        let (a, b) = (lhs(psi), rhs(psi, n_upper));
        worst = worst.max((a[0] - b[0]).norm()).max((a[1] - b[1]).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use gauss_quad::legendre::GaussLegendre;

    #[test]
    fn frequencies() {
        assert_abs_diff_eq!(mode_frequency(0, 1.0, 1.0).unwrap(), PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mode_frequency(-1, 1.0, 1.0).unwrap(), -PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mode_frequency(3, 2.0, 1.0).unwrap(), 7.0 * PI / 4.0, epsilon = 1e-15);
        assert!(mode_frequency(0, 0.0, 1.0).is_err());
        assert!(mode_frequency(0, 1.0, -1.0).is_err());
    }

    #[test]
    fn spinor_at_origin() {
        let psi = mode_function(0, 0.0, 1.0, 0.0).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(psi[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(psi[0].im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(psi[1].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(psi[1].im, s, epsilon = 1e-15);
        assert!(mode_function(0, 1.5, 1.0, 0.0).is_err());
        assert!(mode_function(0, -0.1, 1.0, 0.0).is_err());
    }

    fn overlap(m: i64, n: i64, l: f64) -> c64 {
        let rule = GaussLegendre::new(64.try_into().unwrap());
        let f = |x: f64| {
            let a = mode_function(m, x, l, 0.4).unwrap();
            let b = mode_function(n, x, l, 0.4).unwrap();
            a[0].conj() * b[0] + a[1].conj() * b[1]
        };
        c64::new(
            rule.integrate(0.0, l, |x| f(x).re),
            rule.integrate(0.0, l, |x| f(x).im),
        )
    }

    #[test]
    fn orthonormal() {
        assert_abs_diff_eq!(overlap(0, 0, 1.0).re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(overlap(0, 1, 1.0).norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(overlap(-2, 3, 2.5).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn bag_condition_holds() {
        for n in -2..=2 {
            for theta in [0.0, 1.3] {
                assert!(bag_condition_residual(n, 1.7, theta) < 1e-10, "n = {n}");
            }
        }
    }

    #[test]
    fn dl_derivative_matches_finite_difference() {
        let (n, x, l, th) = (2, 0.3, 1.1, 0.2);
        let h = 1e-6;
        let p = mode_function_unchecked(n, x, l + h, th);
        let m = mode_function_unchecked(n, x, l - h, th);
        let d = mode_function_dl(n, x, l, th);
        for c in 0..2 {
            assert!(((p[c] - m[c]) / (2.0 * h) - d[c]).norm() < 1e-7);
        }
    }
}
