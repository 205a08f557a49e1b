use faer::Mat;
use serde::{Deserialize, Serialize};

use super::sweep::{SweepRow, SweepTable};
use crate::error::{Error, Result};
use crate::stats::Observable;

pub const DEFAULT_MIN_CUTOFF: usize = 16;
pub const MIN_FIT_ROWS: usize = 4;
/// Scaled-design condition number above which a fit is rejected.
pub const MAX_FIT_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Rows with smaller `L` are ignored.
    pub min_cutoff: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            min_cutoff: DEFAULT_MIN_CUTOFF,
        }
    }
}

/// Least-squares coefficients of `<w>` on `{1, L, L^2}` (`beta`) or of
/// `<N>` on `{1, L, ln L}` (`gamma`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub target: Observable,
    pub alpha_over_v: f64,
    pub coefficients: [f64; 3],
    pub basis: [String; 3],
    pub residual_norm: f64,
    pub condition: f64,
    pub l_min: usize,
    pub l_max: usize,
    pub rows_used: usize,
}

impl FitResult {
    /// Coefficient of `L` for the work fit, or of `ln L` for the number fit.
    pub fn slow(&self) -> f64 {
        match self.target {
            Observable::Work => self.coefficients[1],
            Observable::Number => self.coefficients[2],
        }
    }

    /// Coefficient of `L^2` for the work fit, or of `L` for the number fit.
    pub fn fast(&self) -> f64 {
        match self.target {
            Observable::Work => self.coefficients[2],
            Observable::Number => self.coefficients[1],
        }
    }
}

fn basis(target: Observable, l: f64) -> [f64; 3] {
    match target {
        Observable::Work => [1.0, l, l * l],
        Observable::Number => [1.0, l, l.ln()],
    }
}

fn basis_names(target: Observable) -> [String; 3] {
    let names = match target {
        Observable::Work => ["1", "L", "L^2"],
        Observable::Number => ["1", "L", "ln L"],
    };
    names.map(String::from)
}

pub fn fit_scaling(table: &SweepTable, target: Observable) -> Result<FitResult> {
    fit_scaling_with(table, target, FitOptions::default())
}

pub fn fit_scaling_with(table: &SweepTable, target: Observable, opts: FitOptions) -> Result<FitResult> {
    let speeds = table.speeds();
    if speeds.len() != 1 {
        return Err(Error::InvalidConfig(format!(
            "a scaling fit needs rows of exactly one alpha/v, got {speeds:?}"
        )));
    }
    let rows: Vec<&SweepRow> = table
        .rows()
        .iter()
        .filter(|r| r.cutoff >= opts.min_cutoff)
        .collect();
    if rows.len() < MIN_FIT_ROWS {
        return Err(Error::Fit {
            message: format!(
                "{} rows with L >= {} but at least {MIN_FIT_ROWS} are needed",
                rows.len(),
                opts.min_cutoff
            ),
            condition: f64::INFINITY,
        });
    }
    let y: Vec<f64> = rows
        .iter()
        .map(|r| match target {
            Observable::Work => r.mean_w,
            Observable::Number => r.mean_n,
        })
        .collect();
    let design: Vec<[f64; 3]> = rows.iter().map(|r| basis(target, r.cutoff as f64)).collect();
    let (coefficients, condition) = least_squares(&design, &y)?;
    let residual_norm = design
        .iter()
        .zip(&y)
        .map(|(x, yi)| {
            let fit: f64 = x.iter().zip(&coefficients).map(|(a, c)| a * c).sum();
            (yi - fit).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    Ok(FitResult {
        target,
        alpha_over_v: speeds[0],
        coefficients,
        basis: basis_names(target),
        residual_norm,
        condition,
        l_min: rows[0].cutoff,
        l_max: rows[rows.len() - 1].cutoff,
        rows_used: rows.len(),
    })
}

/// Ordinary least squares with unit-norm column scaling, solved through the
/// SVD of the scaled design. Returns the coefficients and the condition
/// number of the scaled design.
fn least_squares(design: &[[f64; 3]], y: &[f64]) -> Result<([f64; 3], f64)> {
    let m = design.len();
    let scale: Vec<f64> = (0..3)
        .map(|j| design.iter().map(|x| x[j] * x[j]).sum::<f64>().sqrt())
        .collect();
    if scale.iter().any(|&s| s == 0.0) {
        return Err(Error::Fit {
            message: "design matrix has a zero column".into(),
            condition: f64::INFINITY,
        });
    }
    let a = Mat::<f64>::from_fn(m, 3, |i, j| design[i][j] / scale[j]);
    let svd = a
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD of the fit design failed: {e:?}")))?;
    let s: Vec<f64> = (0..3).map(|k| svd.S()[k]).collect();
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_FIT_CONDITION) {
        return Err(Error::Fit {
            message: "design matrix is rank deficient".into(),
            condition,
        });
    }
    let (u, v) = (svd.U(), svd.V());
    let mut coef = [0.0; 3];
    for k in 0..3 {
        let uty: f64 = (0..m).map(|i| u[(i, k)] * y[i]).sum::<f64>() / s[k];
        for (j, c) in coef.iter_mut().enumerate() {
            *c += v[(j, k)] * uty;
        }
    }
    for (c, sc) in coef.iter_mut().zip(&scale) {
        *c /= sc;
    }
    Ok((coef, condition))
}
