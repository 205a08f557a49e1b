use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and numerical inputs of one simulation point.
///
/// Energies inside the crate are measured in units of `pi v / l_final`; the
/// reference length and velocity only matter when converting to physical
/// units (see [`ModelConfig::energy_unit`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Wall speed over mode speed, `alpha / v`. Negative for compression.
    #[serde(rename = "alpha_over_v")]
    pub speed_ratio: f64,
    /// `ln(l_final / l_initial)`.
    pub delta_l: f64,
    /// Keeps the `2 L` modes `n = -L, ..., L - 1`.
    pub cutoff: usize,
    /// Boundary phase at both walls.
    #[serde(default)]
    pub theta0: f64,
    /// Final box length `l(t)`.
    #[serde(default = "one")]
    pub l_ref: f64,
    /// Mode speed `v`.
    #[serde(default = "one")]
    pub v_ref: f64,
}

fn one() -> f64 {
    1.0
}

impl ModelConfig {
    pub fn new(speed_ratio: f64, delta_l: f64, cutoff: usize) -> Self {
        Self {
            speed_ratio,
            delta_l,
            cutoff,
            theta0: 0.0,
            l_ref: 1.0,
            v_ref: 1.0,
        }
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_speed_ratio(mut self, speed_ratio: f64) -> Self {
        self.speed_ratio = speed_ratio;
        self
    }

    pub fn with_delta_l(mut self, delta_l: f64) -> Self {
        self.delta_l = delta_l;
        self
    }

    pub fn with_reference(mut self, l_ref: f64, v_ref: f64) -> Self {
        self.l_ref = l_ref;
        self.v_ref = v_ref;
        self
    }

    /// Number of modes, `2 L`.
    pub fn modes(&self) -> usize {
        2 * self.cutoff
    }

    pub fn layout(&self) -> ModeLayout {
        ModeLayout::new(self.cutoff)
    }

    /// `pi v / l_final` in the physical units of `v_ref` and `l_ref` (hbar = 1).
    pub fn energy_unit(&self) -> f64 {
        PI * self.v_ref / self.l_ref
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("speed_ratio", self.speed_ratio),
            ("delta_l", self.delta_l),
            ("theta0", self.theta0),
            ("l_ref", self.l_ref),
            ("v_ref", self.v_ref),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite, got {value}")));
            }
        }
        if self.cutoff < 1 {
            return Err(Error::InvalidConfig("cutoff L must be >= 1".into()));
        }
        if self.l_ref <= 0.0 || self.v_ref <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "l_ref and v_ref must be positive, got l_ref = {}, v_ref = {}",
                self.l_ref, self.v_ref
            )));
        }
        if self.delta_l != 0.0 {
            if self.speed_ratio == 0.0 {
                return Err(Error::InvalidConfig(
                    "alpha/v = 0 requires delta_l = 0 (a static wall cannot change the box length)"
                        .into(),
                ));
            }
            if self.speed_ratio.signum() != self.delta_l.signum() {
                return Err(Error::InvalidConfig(format!(
                    "alpha/v = {} and delta_l = {} must have the same sign \
                     (expansion: both positive, compression: both negative)",
                    self.speed_ratio, self.delta_l
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha/v = {}, delta_l = {}, L = {}",
            self.speed_ratio, self.delta_l, self.cutoff
        )
    }
}

/// The single bijection between mode labels `n in [-L, L-1]` and array
/// indices `i = n + L` used by every matrix in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeLayout {
    cutoff: usize,
}

impl ModeLayout {
    pub fn new(cutoff: usize) -> Self {
        Self { cutoff }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        2 * self.cutoff
    }

    pub fn is_empty(&self) -> bool {
        self.cutoff == 0
    }

    pub fn mode(&self, index: usize) -> i64 {
        debug_assert!(index < self.len());
        index as i64 - self.cutoff as i64
    }

    pub fn index(&self, mode: i64) -> Option<usize> {
        let i = mode + self.cutoff as i64;
        (0..self.len() as i64).contains(&i).then_some(i as usize)
    }

    /// Array index of `a_n` (`c_n`, `n >= 0`).
    pub fn particle(&self, n: usize) -> usize {
        self.cutoff + n
    }

    /// Array index of `b_n` (`c_{-n-1}`, `n >= 0`).
    pub fn antiparticle(&self, n: usize) -> usize {
        self.cutoff - 1 - n
    }

    /// `|n + 1/2|` for every index, the one-particle energies in units of
    /// `pi v / l`.
    pub fn abs_frequencies(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| (self.mode(i) as f64 + 0.5).abs())
            .collect()
    }

    /// Largest total energy of the truncated space, `sum |n + 1/2| = L^2`.
    pub fn max_energy(&self) -> usize {
        self.cutoff * self.cutoff
    }
}
