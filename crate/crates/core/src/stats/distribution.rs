use std::f64::consts::PI;

use faer::c64;
use rustfft::FftPlanner;

use super::chi::{char_values, BranchOptions, Observable};
use super::pairing::PairingState;
use crate::error::{Error, Result};

/// Largest cutoff accepted by [`work_distribution`] without an override.
pub const WORK_DFT_GUARD: usize = 64;
/// Relative tolerance for matching singular values of `G` into pairs.
pub const PAIRING_REL_TOL: f64 = 1e-6;
const PAIRING_ABS_TOL: f64 = 1e-10;

/// Particle-number probabilities indexed by `N = 0..=2L`; odd entries are
/// identically zero.
pub fn number_distribution(state: &PairingState) -> Result<Vec<f64>> {
    let n = state.dim();
    let pair_probs: Vec<f64> = if n == 0 {
        Vec::new()
    } else {
        let mut sv = state
            .g
            .singular_values()
            .map_err(|e| Error::Numerical(format!("SVD of G failed: {e:?}")))?;
        sv.sort_by(|a, b| b.total_cmp(a));
        let mut probs = Vec::with_capacity(n / 2);
        for pair in sv.chunks(2) {
            let (a, b) = (pair[0], pair.get(1).copied().unwrap_or(0.0));
            if pair.len() == 1 && a > PAIRING_ABS_TOL
                || (a - b).abs() > PAIRING_REL_TOL * a + PAIRING_ABS_TOL
            {
                return Err(Error::Pairing(sv));
            }
            let s2 = 0.5 * (a * a + b * b);
            probs.push(s2 / (1.0 + s2));
        }
        probs
    };

    // Poisson-binomial over independent pairs.
    let mut dp = vec![0.0; pair_probs.len() + 1];
    dp[0] = 1.0;
    for (j, &p) in pair_probs.iter().enumerate() {
        for m in (1..=j + 1).rev() {
            dp[m] = dp[m] * (1.0 - p) + dp[m - 1] * p;
        }
        dp[0] *= 1.0 - p;
    }
    let mut out = vec![0.0; n + 1];
    for (m, p) in dp.into_iter().enumerate() {
        out[2 * m] = p;
    }
    Ok(out)
}

/// Same distribution as [`number_distribution`], from an inverse DFT of
/// `chi_N` sampled at `u_k = pi k / (L + 1)`.
pub fn number_distribution_dft(state: &PairingState) -> Result<Vec<f64>> {
    let pairs = state.dim() / 2;
    let m = pairs + 1;
    let us: Vec<f64> = (0..m).map(|k| PI * k as f64 / m as f64).collect();
    let mut buf = char_values(state, Observable::Number, &us, BranchOptions::default())?;
    FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
    let mut out = vec![0.0; state.dim() + 1];
    for (k, v) in buf.iter().enumerate() {
        out[2 * k] = v.re / m as f64;
    }
    Ok(out)
}

/// Work probabilities indexed by `w = 0..=L^2` in units of `pi v / l_final`,
/// from an inverse DFT of `chi_w` on `M = 2 (L^2 + 1)` points of `[0, 2 pi)`.
pub fn work_distribution(state: &PairingState, allow_large: bool) -> Result<Vec<f64>> {
    let cutoff = state.dim() / 2;
    if cutoff > WORK_DFT_GUARD && !allow_large {
        return Err(Error::Size(format!(
            "work distribution at L = {cutoff} exceeds the default guard L <= {WORK_DFT_GUARD}; \
             pass the override to proceed"
        )));
    }
    let support = cutoff * cutoff + 1;
    let m = 2 * support;
    // chi_w is 2 pi periodic and Hermitian, so only the first half is walked.
    let us: Vec<f64> = (0..=m / 2).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    let half = char_values(state, Observable::Work, &us, BranchOptions::default())?;
    let mut buf: Vec<c64> = (0..m)
        .map(|k| if k <= m / 2 { half[k] } else { half[m - k].conj() })
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
    Ok(buf[..support].iter().map(|v| v.re / m as f64).collect())
}
