//! Characteristic functions of work and particle number from the Gaussian
//! overlap `chi(u) = sqrt(det(1 + G^dag G~(u)) / det(1 + G^dag G))` with
//! `G~ = D~ G D~`.
//!
//! The square root is taken on the branch that is continuous from
//! `chi(0) = 1`: the log-determinant is followed along the segment `[0, u]`
//! and its phase unwrapped step by step, halving steps whose phase jump is
//! too large to unwrap unambiguously.

use std::f64::consts::PI;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::pairing::PairingState;
use crate::error::{Error, Result};
use crate::linalg::{log_det, scale_rows_cols};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Work,
    Number,
}

impl Observable {
    /// Eigenvalue of the observable carried by each mode occupation.
    pub fn weights(self, state: &PairingState) -> Vec<f64> {
        match self {
            Observable::Work => state.freq_abs.clone(),
            Observable::Number => vec![1.0; state.dim()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOptions {
    /// Largest accepted phase change of `ln det` between path points.
    pub max_phase_step: f64,
    /// Maximum number of times a path segment may be halved.
    pub max_halvings: u32,
}

impl Default for BranchOptions {
    fn default() -> Self {
        Self {
            max_phase_step: 0.5,
            max_halvings: 24,
        }
    }
}

/// `ln det(1 + G^dag D G D)` with `D = diag(exp(i u w_n))`; imaginary part
/// modulo `2 pi`.
fn log_det_gamma(state: &PairingState, weights: &[f64], u: f64) -> c64 {
    let n = state.dim();
    let d: Vec<c64> = weights.iter().map(|&w| c64::cis(u * w)).collect();
    let dgd = scale_rows_cols(state.g.as_ref(), &d, &d);
    let m = state.g.adjoint() * &dgd + Mat::<c64>::identity(n, n);
    log_det(m.as_ref())
}

fn unwrap_near(raw: c64, reference: f64) -> c64 {
    let turns = ((reference - raw.im) / (2.0 * PI)).round();
    c64::new(raw.re, raw.im + 2.0 * PI * turns)
}

/// Follows the continuous branch of `ln det` from a known point.
struct Walker<'a> {
    state: &'a PairingState,
    weights: Vec<f64>,
    opts: BranchOptions,
    u: f64,
    log_det: c64,
}

impl<'a> Walker<'a> {
    fn new(state: &'a PairingState, obs: Observable, opts: BranchOptions) -> Self {
        Self {
            state,
            weights: obs.weights(state),
            opts,
            u: 0.0,
            // det(1 + G^dag G) is real positive.
            log_det: c64::new(state.log_norm_det, 0.0),
        }
    }

    fn advance(&mut self, target: f64) -> Result<c64> {
        self.log_det = self.segment(self.u, self.log_det, target, 0)?;
        self.u = target;
        Ok(((self.log_det - self.state.log_norm_det) * 0.5).exp())
    }

    fn segment(&self, from: f64, from_ld: c64, to: f64, depth: u32) -> Result<c64> {
        let raw = log_det_gamma(self.state, &self.weights, to);
        let candidate = unwrap_near(raw, from_ld.im);
        if (candidate.im - from_ld.im).abs() <= self.opts.max_phase_step {
            return Ok(candidate);
        }
        if depth >= self.opts.max_halvings {
            return Err(Error::Branch { u: to, depth });
        }
        let mid = 0.5 * (from + to);
        let mid_ld = self.segment(from, from_ld, mid, depth + 1)?;
        self.segment(mid, mid_ld, to, depth + 1)
    }
}

/// Characteristic function at every point of `us` (any order, any sign).
/// Positive and negative points are each reached by one continuous walk
/// outward from `u = 0`.
pub fn char_values(
    state: &PairingState,
    obs: Observable,
    us: &[f64],
    opts: BranchOptions,
) -> Result<Vec<c64>> {
    let mut out = vec![c64::new(1.0, 0.0); us.len()];
    let mut pos: Vec<usize> = (0..us.len()).filter(|&i| us[i] > 0.0).collect();
    let mut neg: Vec<usize> = (0..us.len()).filter(|&i| us[i] < 0.0).collect();
    pos.sort_by(|&a, &b| us[a].total_cmp(&us[b]));
    neg.sort_by(|&a, &b| us[b].total_cmp(&us[a]));
    for side in [pos, neg] {
        let mut walker = Walker::new(state, obs, opts);
        for i in side {
            out[i] = walker.advance(us[i])?;
        }
    }
    Ok(out)
}

/// `chi_w(u) = <0| exp(i u E~) |0>`, `u` conjugate to energies in units of
/// `pi v / l_final`.
pub fn char_work(state: &PairingState, u: f64) -> Result<c64> {
    Ok(char_values(state, Observable::Work, &[u], BranchOptions::default())?[0])
}

/// `chi_N(u) = <0| exp(i u N~) |0>`; `pi`-periodic since only pairs are
/// created.
pub fn char_number(state: &PairingState, u: f64) -> Result<c64> {
    Ok(char_values(state, Observable::Number, &[u], BranchOptions::default())?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::{diagonalize, evolve};
    use crate::model::{build_quadratic_form, ModelConfig};
    use crate::stats::pairing_matrix;
    use std::f64::consts::LN_2;

    fn state(alpha: f64, dl: f64, cutoff: usize) -> PairingState {
        let cfg = ModelConfig::new(alpha, dl, cutoff);
        let sol = diagonalize(&build_quadratic_form(&cfg).unwrap()).unwrap();
        pairing_matrix(&evolve(&sol, dl), &cfg).unwrap()
    }

    #[test]
    fn normalised_at_origin() {
        let s = state(2.0, LN_2, 3);
        assert_eq!(char_work(&s, 0.0).unwrap(), c64::new(1.0, 0.0));
        assert_eq!(char_number(&s, 0.0).unwrap(), c64::new(1.0, 0.0));
    }

    #[test]
    fn trivial_without_expansion() {
        let s = state(0.7, 0.0, 3);
        for u in [-3.0, 0.4, 11.0] {
            assert!((char_work(&s, u).unwrap() - 1.0).norm() < 1e-14);
            assert!((char_number(&s, u).unwrap() - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn number_function_has_period_pi() {
        let s = state(2.0, LN_2, 4);
        let v = char_number(&s, PI).unwrap();
        assert!((v - 1.0).norm() < 1e-10, "{v}");
        let a = char_number(&s, 0.37).unwrap();
        let b = char_number(&s, 0.37 + PI).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn hermitian_symmetry_and_bound() {
        let s = state(1.5, 0.9, 4);
        let us: Vec<f64> = (-20..=20).map(|k| 0.5 * k as f64).collect();
        let vals = char_values(&s, Observable::Work, &us, BranchOptions::default()).unwrap();
        for (k, v) in vals.iter().enumerate() {
            assert!(v.norm() <= 1.0 + 1e-10);
            let mirror = vals[us.len() - 1 - k];
            assert!((v - mirror.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn grid_walk_matches_single_points() {
        let s = state(2.0, LN_2, 3);
        let us = [2.3, 0.1, -1.0, 0.7];
        let vals = char_values(&s, Observable::Work, &us, BranchOptions::default()).unwrap();
        for (u, v) in us.iter().zip(vals) {
            assert!((char_work(&s, *u).unwrap() - v).norm() < 1e-12);
        }
    }

    #[test]
    fn exhausted_branch_reports_error() {
        let s = state(2.0, LN_2, 4);
        let opts = BranchOptions {
            max_phase_step: 1e-9,
            max_halvings: 2,
        };
        let r = char_values(&s, Observable::Work, &[3.0], opts);
        assert!(matches!(r, Err(Error::Branch { .. })));
    }
}
