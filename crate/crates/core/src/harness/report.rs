use serde::{Deserialize, Serialize};

use crate::bogoliubov::{diagonalize, evolve, EvolvedTransform};
use crate::error::{Error, Result};
use crate::model::{build_quadratic_form, ModelConfig};
use crate::stats::{analytic_moments, moments_fd, pairing_matrix, FdMoments, FdOptions, Observable, PairingState};

/// Unit label of every energy-valued output.
pub const WORK_UNIT: &str = "pi*v/l_final";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub value: f64,
    pub method: Method,
}

impl Moment {
    fn analytic(value: f64) -> Self {
        Self {
            value,
            method: Method::Analytic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdCheck {
    pub work: FdMoments,
    pub number: FdMoments,
}

impl FdCheck {
    pub fn flagged(&self) -> bool {
        self.work.flagged || self.number.flagged
    }
}

/// Orders 1 and 2 of work and particle number for one configuration.
/// Work entries are in [`WORK_UNIT`]; multiply by `energy_unit` for the
/// reference length and velocity of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub config: ModelConfig,
    pub work_unit: String,
    pub energy_unit: f64,
    pub mean_w: Moment,
    pub m2_w: Moment,
    pub var_w: Moment,
    pub mean_n: Moment,
    pub m2_n: Moment,
    pub var_n: Moment,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fd_check: Option<FdCheck>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    /// Also differentiate the characteristic functions numerically.
    pub fd: Option<FdOptions>,
}

/// Evolved transform and Gaussian state of the vacuum for `config`.
/// A zero expansion short-circuits to the identity, so `alpha/v = 0` is
/// accepted there.
pub fn prepare_state(config: &ModelConfig) -> Result<(EvolvedTransform, PairingState)> {
    config.validate()?;
    let t = if config.delta_l == 0.0 {
        EvolvedTransform::identity(config.modes())
    } else {
        let form = build_quadratic_form(config)?;
        evolve(&diagonalize(&form)?, config.delta_l)
    };
    let state = pairing_matrix(&t, config)?;
    Ok((t, state))
}

pub fn run_point(config: &ModelConfig) -> Result<MomentReport> {
    run_point_with(config, RunOptions::default())
}

pub fn run_point_with(config: &ModelConfig, opts: RunOptions) -> Result<MomentReport> {
    run_inner(config, opts).map_err(|e| Error::AtConfig {
        config: config.to_string(),
        source: Box::new(e),
    })
}

fn run_inner(config: &ModelConfig, opts: RunOptions) -> Result<MomentReport> {
    let (t, state) = prepare_state(config)?;
    let (mean_w, m2_w) = analytic_moments(&t, &state, Observable::Work);
    let (mean_n, m2_n) = analytic_moments(&t, &state, Observable::Number);
    let fd_check = match opts.fd {
        Some(fd) => Some(FdCheck {
            work: moments_fd(&state, Observable::Work, 2, fd)?,
            number: moments_fd(&state, Observable::Number, 2, fd)?,
        }),
        None => None,
    };
    Ok(MomentReport {
        config: *config,
        work_unit: WORK_UNIT.to_string(),
        energy_unit: config.energy_unit(),
        mean_w: Moment::analytic(mean_w),
        m2_w: Moment::analytic(m2_w),
        var_w: Moment::analytic(m2_w - mean_w * mean_w),
        mean_n: Moment::analytic(mean_n),
        m2_n: Moment::analytic(m2_n),
        var_n: Moment::analytic(m2_n - mean_n * mean_n),
        fd_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn zero_expansion_is_quiet() {
        for speed in [0.0, 0.3, -2.0] {
            let r = run_point(&ModelConfig::new(speed, 0.0, 8)).unwrap();
            for m in [r.mean_w, r.m2_w, r.mean_n, r.m2_n] {
                assert_eq!(m.value, 0.0);
            }
        }
    }

    #[test]
    fn moments_are_physical() {
        let r = run_point_with(
            &ModelConfig::new(1.5, LN_2, 6),
            RunOptions {
                fd: Some(FdOptions::default()),
            },
        )
        .unwrap();
        assert!(r.mean_w.value > 0.0 && r.mean_n.value > 0.0);
        assert!(r.var_w.value >= -1e-8 && r.var_n.value >= -1e-8);
        let fd = r.fd_check.unwrap();
        assert!(!fd.flagged());
        assert!((fd.number.moments[1] - r.m2_n.value).abs() < 1e-6 * r.m2_n.value);
    }

    #[test]
    fn errors_name_the_configuration() {
        let e = run_point(&ModelConfig::new(0.0, 0.5, 2)).unwrap_err();
        assert!(e.is_validation());
        assert!(e.to_string().contains("L = 2"), "{e}");
    }
}
