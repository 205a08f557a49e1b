use std::f64::consts::PI;

use faer::{c64, Mat};

use super::config::{ModelConfig, ModeLayout};
use super::coupling::coupling_element;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, skew_defect, CMat};

/// Blocks of the time-independent generator
/// `H~ = sum c_m^dag A_mn c_n + 1/2 (c_m^dag B_mn c_n^dag + h.c.)`
/// over the `2 L` truncated modes, in the [`ModeLayout`] ordering.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub a_block: CMat,
    pub b_block: CMat,
    pub layout: ModeLayout,
}

impl QuadraticForm {
    pub fn dim(&self) -> usize {
        self.layout.len()
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(self.a_block.as_ref())
    }

    pub fn skew_defect(&self) -> f64 {
        skew_defect(self.b_block.as_ref())
    }

    /// Whether A only couples same-sign modes and B only opposite-sign
    /// modes. This is what splits the BdG problem into two conjugate sectors.
    pub fn is_sector_structured(&self) -> bool {
        let n = self.dim();
        let zero = c64::new(0.0, 0.0);
        for j in 0..n {
            for i in 0..n {
                let same = (self.layout.mode(i) >= 0) == (self.layout.mode(j) >= 0);
                let forbidden = if same { self.b_block[(i, j)] } else { self.a_block[(i, j)] };
                if forbidden != zero {
                    return false;
                }
            }
        }
        true
    }
}

/// Builds the dimensionless blocks: `A_nn = |n + 1/2| pi / (alpha/v)`,
/// `A_mn = -i K_mn` for same-sign pairs, `B_mn = -i K_mn` for `m >= 0 > n`
/// (and `-B_nm` on the mirrored entry), zero elsewhere.
pub fn build_quadratic_form(config: &ModelConfig) -> Result<QuadraticForm> {
    config.validate()?;
    if config.speed_ratio == 0.0 {
        return Err(Error::DegenerateDrive);
    }
    let layout = config.layout();
    let n = layout.len();
    let minus_i = c64::new(0.0, -1.0);
    let mut a = Mat::<c64>::zeros(n, n);
    let mut b = Mat::<c64>::zeros(n, n);
    for i in 0..n {
        let m = layout.mode(i);
        a[(i, i)] = c64::new((m as f64 + 0.5).abs() * PI / config.speed_ratio, 0.0);
        for j in 0..n {
            if i == j {
                continue;
            }
            let k = layout.mode(j);
            let entry = minus_i * coupling_element(m, k);
            match (m >= 0, k >= 0) {
                (true, true) | (false, false) => a[(i, j)] = entry,
                (true, false) => {
                    b[(i, j)] = entry;
                    b[(j, i)] = -entry;
                }
                (false, true) => {}
            }
        }
    }
    Ok(QuadraticForm {
        a_block: a,
        b_block: b,
        layout,
    })
}
