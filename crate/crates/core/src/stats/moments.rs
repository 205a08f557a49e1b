use faer::c64;
use serde::{Deserialize, Serialize};

use super::chi::{char_values, BranchOptions, Observable};
use super::pairing::PairingState;
use crate::bogoliubov::EvolvedTransform;
use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, CMat};

/// FD order-1 relative error above which the report is flagged.
pub const FD_FLAG_TOL: f64 = 1e-5;
/// FD order-1 relative error above which the FD route is rejected.
pub const FD_REJECT_TOL: f64 = 1e-3;
/// Absolute floor on the denominator of the FD relative error.
pub const FD_REL_FLOOR: f64 = 1e-6;

/// `<N> = sum_n <0| c~_n^dag c~_n |0> = ||v~||_F^2`.
pub fn mean_number_analytic(t: &EvolvedTransform) -> f64 {
    frobenius_sq(t.v_t.as_ref())
}

/// `<w> = sum_n |omega_n| (v~ v~^dag)_nn` in units of `pi v / l_final`.
pub fn mean_work_analytic(t: &EvolvedTransform, state: &PairingState) -> f64 {
    let n = t.dim();
    (0..n)
        .map(|i| {
            let occ: f64 = (0..n).map(|k| t.v_t[(i, k)].norm_sqr()).sum();
            state.freq_abs[i] * occ
        })
        .sum()
}

/// First and second moments of `sum_a eps_a c~_a^dag c~_a` by Wick's theorem,
/// with `P = v~* v~^T` and `F = u~ v~^T`.
pub fn wick_moments(t: &EvolvedTransform, weights: &[f64]) -> (f64, f64) {
    let n = t.dim();
    assert_eq!(weights.len(), n);
    let p: CMat = t.v_t.conjugate() * t.v_t.transpose();
    let f: CMat = &t.u_t * t.v_t.transpose();
    let mean: f64 = (0..n).map(|a| weights[a] * p[(a, a)].re).sum();
    let mut m2 = mean * mean;
    for b in 0..n {
        for a in 0..n {
            m2 += weights[a] * weights[b] * (f[(a, b)].norm_sqr() - p[(a, b)].norm_sqr());
        }
    }
    m2 += (0..n).map(|a| weights[a] * weights[a] * p[(a, a)].re).sum::<f64>();
    (mean, m2)
}

pub fn analytic_moments(
    t: &EvolvedTransform,
    state: &PairingState,
    obs: Observable,
) -> (f64, f64) {
    wick_moments(t, &obs.weights(state))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdOptions {
    pub step: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self { step: 1e-3 }
    }
}

/// Raw moments from finite differences of a characteristic function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdMoments {
    pub observable: Observable,
    /// `moments[k - 1] = <O^k>`.
    pub moments: Vec<f64>,
    pub step: f64,
    /// Relative disagreement of the first moment with the analytic mean.
    pub mean_relative_error: f64,
    pub flagged: bool,
}

impl FdMoments {
    pub fn variance(&self) -> Option<f64> {
        match self.moments.as_slice() {
            [m1, m2, ..] => Some(m2 - m1 * m1),
            _ => None,
        }
    }
}

/// Central-difference derivatives of `chi` at the origin with step `h`,
/// given samples at `0, +-h, +-2h`.
fn central(order: usize, f0: c64, p1: c64, m1: c64, p2: c64, m2: c64, h: f64) -> c64 {
    match order {
        1 => (p1 - m1) / (2.0 * h),
        2 => (p1 - f0 * 2.0 + m1) / (h * h),
        3 => (p2 - p1 * 2.0 + m1 * 2.0 - m2) / (2.0 * h * h * h),
        4 => (p2 - p1 * 4.0 + f0 * 6.0 - m1 * 4.0 + m2) / (h * h * h * h),
        _ => unreachable!(),
    }
}

/// `<O^k> = (-i)^k chi^(k)(0)` for `k = 1..=max_order`, central differences
/// with one Richardson step `(4 D(h/2) - D(h)) / 3`.
pub fn moments_fd(
    state: &PairingState,
    obs: Observable,
    max_order: usize,
    opts: FdOptions,
) -> Result<FdMoments> {
    if !(1..=4).contains(&max_order) {
        return Err(Error::Domain(format!(
            "finite-difference moments support orders 1 to 4, got {max_order}"
        )));
    }
    let h = opts.step;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {h}")));
    }
    let us = [0.5 * h, -0.5 * h, h, -h, 2.0 * h, -2.0 * h];
    let s = char_values(state, obs, &us, BranchOptions::default())?;
    let f0 = c64::new(1.0, 0.0);
    let mut moments = Vec::with_capacity(max_order);
    let mut phase = c64::new(1.0, 0.0);
    for k in 1..=max_order {
        phase *= c64::new(0.0, -1.0);
        let coarse = central(k, f0, s[2], s[3], s[4], s[5], h);
        let fine = central(k, f0, s[0], s[1], s[2], s[3], 0.5 * h);
        let d = (fine * 4.0 - coarse) / 3.0;
        moments.push((phase * d).re);
    }

    let analytic = match obs {
        Observable::Work => state.mean_work(),
        Observable::Number => state.mean_number(),
    };
    let rel = (moments[0] - analytic).abs() / analytic.abs().max(FD_REL_FLOOR);
    if rel > FD_REJECT_TOL {
        return Err(Error::Consistency {
            fd: moments[0],
            analytic,
            relative: rel,
        });
    }
    Ok(FdMoments {
        observable: obs,
        moments,
        step: h,
        mean_relative_error: rel,
        flagged: rel > FD_FLAG_TOL,
    })
}
