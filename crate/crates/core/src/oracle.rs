//! Brute-force reference on the full `2^(2L)`-dimensional Fock space.
//!
//! Fermion operators use a Jordan-Wigner string in the global mode ordering:
//! bit `i` of a basis label is the occupation of array index `i`, and
//! `c_i |s> = (-1)^(occupied modes below i) |s ^ (1 << i)>`.

use std::sync::OnceLock;

use faer::{c64, Mat, Side};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, CMat};
use crate::model::{build_quadratic_form, ModeLayout, ModelConfig};
use crate::stats::Observable;

/// Default largest cutoff (Fock dimension 1024).
pub const ORACLE_GUARD: usize = 5;
/// Largest cutoff accepted with the override.
pub const ORACLE_GUARD_OVERRIDE: usize = 6;
/// `|<0|U|0>|` below which pair amplitudes are not normalisable.
pub const OVERLAP_FLOOR: f64 = 1e-12;

/// Applies `c_i` (`create == false`) or `c_i^dag` to basis state `s`.
pub fn ladder(create: bool, i: usize, s: usize) -> Option<(f64, usize)> {
    let bit = 1usize << i;
    if (s & bit != 0) == create {
        return None;
    }
    let sign = if (s & (bit - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((sign, s ^ bit))
}

/// Applies a product of ladder operators, rightmost first.
fn apply_string(ops: &[(bool, usize)], s: usize) -> Option<(f64, usize)> {
    let mut sign = 1.0;
    let mut state = s;
    for &(create, i) in ops.iter().rev() {
        let (sg, next) = ladder(create, i, state)?;
        sign *= sg;
        state = next;
    }
    Some((sign, state))
}

pub struct FockOperators {
    pub layout: ModeLayout,
    pub h_tilde: CMat,
    /// Energy of each basis state in units of `pi v / l_final`.
    pub energy: Vec<f64>,
    pub number: Vec<u32>,
    eig: OnceLock<(CMat, Vec<f64>)>,
}

impl std::fmt::Debug for FockOperators {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FockOperators")
            .field("cutoff", &self.layout.cutoff())
            .field("dim", &self.dim())
            .finish()
    }
}

pub fn build_fock_operators(config: &ModelConfig, allow_l6: bool) -> Result<FockOperators> {
    let limit = if allow_l6 { ORACLE_GUARD_OVERRIDE } else { ORACLE_GUARD };
    if config.cutoff > limit {
        return Err(Error::Size(format!(
            "Fock oracle supports L <= {limit} (L = 6 needs the override), got L = {}",
            config.cutoff
        )));
    }
    let form = build_quadratic_form(config)?;
    let layout = form.layout;
    let modes = layout.len();
    let dim = 1usize << modes;
    let mut h = Mat::<c64>::zeros(dim, dim);
    for s in 0..dim {
        for m in 0..modes {
            for n in 0..modes {
                let a = form.a_block[(m, n)];
                if a != c64::new(0.0, 0.0) {
                    if let Some((sg, t)) = apply_string(&[(true, m), (false, n)], s) {
                        h[(t, s)] += a * sg;
                    }
                }
                let b = form.b_block[(m, n)];
                if b != c64::new(0.0, 0.0) {
                    if let Some((sg, t)) = apply_string(&[(true, m), (true, n)], s) {
                        h[(t, s)] += b * (0.5 * sg);
                    }
                    if let Some((sg, t)) = apply_string(&[(false, n), (false, m)], s) {
                        h[(t, s)] += b.conj() * (0.5 * sg);
                    }
                }
            }
        }
    }
    let defect = hermitian_defect(h.as_ref());
    if defect > 1e-12 * dim as f64 {
        return Err(Error::Numerical(format!("Fock H~ is not Hermitian: {defect:.3e}")));
    }
    let freq = layout.abs_frequencies();
    let energy = (0..dim)
        .map(|s| (0..modes).filter(|&i| s >> i & 1 == 1).map(|i| freq[i]).sum())
        .collect();
    let number = (0..dim).map(|s: usize| s.count_ones()).collect();
    Ok(FockOperators {
        layout,
        h_tilde: h,
        energy,
        number,
        eig: OnceLock::new(),
    })
}

impl FockOperators {
    pub fn dim(&self) -> usize {
        self.h_tilde.nrows()
    }

    /// Dense matrix of `c_i` (or `c_i^dag`).
    pub fn ladder_matrix(&self, create: bool, i: usize) -> CMat {
        let dim = self.dim();
        let mut m = Mat::<c64>::zeros(dim, dim);
        for s in 0..dim {
            if let Some((sg, t)) = ladder(create, i, s) {
                m[(t, s)] = c64::new(sg, 0.0);
            }
        }
        m
    }

    fn eigen(&self) -> Result<&(CMat, Vec<f64>)> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let evd = self
            .h_tilde
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("Fock eigendecomposition failed: {e:?}")))?;
        let vals = (0..self.dim()).map(|k| evd.S()[k].re).collect();
        let _ = self.eig.set((evd.U().to_owned(), vals));
        Ok(self.eig.get().unwrap())
    }

    /// Ascending eigenvalues of `H~`.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.1.clone())
    }

    /// `U |0>` with `U = exp(-i H~ delta_l)`.
    pub fn evolved_vacuum(&self, delta_l: f64) -> Result<Vec<c64>> {
        let dim = self.dim();
        if delta_l == 0.0 {
            let mut psi = vec![c64::new(0.0, 0.0); dim];
            psi[0] = c64::new(1.0, 0.0);
            return Ok(psi);
        }
        let (v, lam) = self.eigen()?;
        let coef: Vec<c64> = (0..dim)
            .map(|k| c64::cis(-lam[k] * delta_l) * v[(0, k)].conj())
            .collect();
        Ok((0..dim)
            .map(|s| (0..dim).map(|k| v[(s, k)] * coef[k]).sum())
            .collect())
    }

    fn values(&self, obs: Observable) -> Vec<f64> {
        match obs {
            Observable::Work => self.energy.clone(),
            Observable::Number => self.number.iter().map(|&n| n as f64).collect(),
        }
    }
}

/// `<0| U^dag exp(i u O) U |0>` at each `u`.
pub fn oracle_char_values(
    ops: &FockOperators,
    delta_l: f64,
    us: &[f64],
    obs: Observable,
) -> Result<Vec<c64>> {
    let psi = ops.evolved_vacuum(delta_l)?;
    let vals = ops.values(obs);
    Ok(us
        .iter()
        .map(|&u| {
            psi.iter()
                .zip(&vals)
                .map(|(p, &x)| c64::cis(u * x) * p.norm_sqr())
                .sum()
        })
        .collect())
}

pub fn oracle_char(ops: &FockOperators, delta_l: f64, u: f64, obs: Observable) -> Result<c64> {
    Ok(oracle_char_values(ops, delta_l, &[u], obs)?[0])
}

/// Raw moments `<O^k>`, `k = 1..=max_order`.
pub fn oracle_moments(
    ops: &FockOperators,
    delta_l: f64,
    obs: Observable,
    max_order: usize,
) -> Result<Vec<f64>> {
    let psi = ops.evolved_vacuum(delta_l)?;
    let vals = ops.values(obs);
    Ok((1..=max_order as i32)
        .map(|k| psi.iter().zip(&vals).map(|(p, &x)| p.norm_sqr() * x.powi(k)).sum())
        .collect())
}

/// Probabilities over the integer lattice `0..=L^2` (work) or `0..=2L`
/// (number).
pub fn oracle_distribution(ops: &FockOperators, delta_l: f64, obs: Observable) -> Result<Vec<f64>> {
    let psi = ops.evolved_vacuum(delta_l)?;
    let cutoff = ops.layout.cutoff();
    let len = match obs {
        Observable::Work => cutoff * cutoff + 1,
        Observable::Number => 2 * cutoff + 1,
    };
    let mut out = vec![0.0; len];
    for (p, x) in psi.iter().zip(ops.values(obs)) {
        let k = x.round();
        if (x - k).abs() > 1e-10 {
            // Odd-charge states sit off the lattice and are never populated.
            if p.norm_sqr() > 1e-24 {
                return Err(Error::Numerical(format!("weight {:e} on non-integer eigenvalue {x}", p.norm_sqr())));
            }
            continue;
        }
        out[k as usize] += p.norm_sqr();
    }
    Ok(out)
}

/// `A[m][n] = <0| b_n a_m U |0> / <0| U |0>` for `m, n` in `0..L`.
pub fn oracle_pair_amplitudes(ops: &FockOperators, delta_l: f64) -> Result<Vec<Vec<c64>>> {
    let psi = ops.evolved_vacuum(delta_l)?;
    let overlap = psi[0];
    if overlap.norm() < OVERLAP_FLOOR {
        return Err(Error::DegenerateOverlap(overlap.norm()));
    }
    let lay = ops.layout;
    let cutoff = lay.cutoff();
    Ok((0..cutoff)
        .map(|m| {
            (0..cutoff)
                .map(|n| {
                    let (a, b) = (lay.particle(m), lay.antiparticle(n));
                    // <0| b a = (a^dag b^dag |0>)^dag
                    let (sg, s) = apply_string(&[(true, a), (true, b)], 0).unwrap();
                    psi[s] * sg / overlap
                })
                .collect()
        })
        .collect())
}
