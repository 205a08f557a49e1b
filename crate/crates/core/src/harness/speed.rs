use std::io::Write;

use serde::{Deserialize, Serialize};

use super::fit::{fit_scaling_with, FitOptions, FitResult};
use super::sweep::{format_float, sweep_cutoff, SweepTable};
use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::stats::Observable;

pub const SPEED_HEADER: [&str; 11] = [
    "alpha_over_v",
    "beta0 [pi*v/l_final]",
    "beta1 [pi*v/l_final]",
    "beta2 [pi*v/l_final]",
    "gamma0",
    "gamma1",
    "gamma_l",
    "residual_w [pi*v/l_final]",
    "residual_n",
    "condition_w",
    "condition_n",
];

/// Default cutoff grid: powers of two from 8 to 512.
pub fn default_cutoffs() -> Vec<usize> {
    (3..=9).map(|k| 1usize << k).collect()
}

/// Default speed grid: 0.1 to 3.0 in steps of 0.1.
pub fn default_speeds() -> Vec<f64> {
    (1..=30).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedRow {
    pub alpha_over_v: f64,
    pub work: FitResult,
    pub number: FitResult,
}

impl SpeedRow {
    pub fn beta2(&self) -> f64 {
        self.work.coefficients[2]
    }

    pub fn gamma1(&self) -> f64 {
        self.number.coefficients[1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedFailure {
    pub alpha_over_v: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpeedSweep {
    pub rows: Vec<SpeedRow>,
    pub failures: Vec<SpeedFailure>,
    /// Cutoff sweep behind every successful row, merged.
    pub table: SweepTable,
}

impl SpeedSweep {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SPEED_HEADER)?;
        for r in &self.rows {
            let (b, g) = (r.work.coefficients, r.number.coefficients);
            let fields = [
                r.alpha_over_v,
                b[0],
                b[1],
                b[2],
                g[0],
                g[1],
                g[2],
                r.work.residual_norm,
                r.number.residual_norm,
                r.work.condition,
                r.number.condition,
            ];
            w.write_record(fields.map(format_float))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Cutoff sweep and both scaling fits for every speed. The sign of
/// `base.delta_l` follows each speed, so negative speeds describe compression
/// by the same ratio. Failed speeds are recorded and skipped. Rows are
/// ordered by speed.
pub fn sweep_speed(
    base: &ModelConfig,
    speed_values: &[f64],
    l_values: &[usize],
    fit: FitOptions,
    mut progress: impl FnMut(&ModelConfig, std::result::Result<&SpeedRow, &Error>),
) -> Result<SpeedSweep> {
    if speed_values.is_empty() {
        return Err(Error::InvalidConfig("no speed values given".into()));
    }
    if let Some(s) = speed_values.iter().find(|s| **s == 0.0 || !s.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "speed values must be finite and non-zero, got {s}"
        )));
    }
    let mut speeds = speed_values.to_vec();
    speeds.sort_by(f64::total_cmp);
    speeds.dedup();

    let mut out = SpeedSweep::default();
    for speed in speeds {
        let cfg = base
            .with_speed_ratio(speed)
            .with_delta_l(base.delta_l.abs().copysign(speed));
        let attempt = sweep_cutoff(&cfg, l_values).and_then(|table| {
            let work = fit_scaling_with(&table, Observable::Work, fit)?;
            let number = fit_scaling_with(&table, Observable::Number, fit)?;
            Ok((table, SpeedRow { alpha_over_v: speed, work, number }))
        });
        match attempt {
            Ok((table, row)) => {
                progress(&cfg, Ok(&row));
                out.table = std::mem::take(&mut out.table).merge(table)?;
                out.rows.push(row);
            }
            Err(e) => {
                progress(&cfg, Err(&e));
                out.failures.push(SpeedFailure {
                    alpha_over_v: speed,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}
