//! Merges `--config` files and command-line flags into a [`ModelConfig`].

use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};

use clap::Args;
use dce_core::{Error, ModelConfig, Result};
use serde::Deserialize;

pub const DEFAULT_DELTA_L: f64 = LN_2;
pub const DEFAULT_CUTOFF: usize = 8;

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// JSON file whose keys mirror these flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Wall speed over mode speed (negative for compression).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_over_v: Option<f64>,
    /// ln(l_final / l_initial) [default: ln 2].
    #[arg(long, allow_negative_numbers = true, conflicts_with = "l_ratio")]
    pub delta_l: Option<f64>,
    /// l_final / l_initial, alternative to --delta-l.
    #[arg(long)]
    pub l_ratio: Option<f64>,
    /// Mode cutoff L (modes -L..L-1) [default: 8].
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Boundary phase [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    /// Final box length used for physical units [default: 1].
    #[arg(long)]
    pub l_ref: Option<f64>,
    /// Mode speed used for physical units [default: 1].
    #[arg(long)]
    pub v_ref: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileArgs {
    #[serde(alias = "alpha_over_v")]
    alpha_over_v: Option<f64>,
    #[serde(alias = "delta_l")]
    delta_l: Option<f64>,
    #[serde(alias = "l_ratio")]
    l_ratio: Option<f64>,
    cutoff: Option<usize>,
    theta0: Option<f64>,
    #[serde(alias = "l_ref")]
    l_ref: Option<f64>,
    #[serde(alias = "v_ref")]
    v_ref: Option<f64>,
}

fn read_file(path: &Path) -> Result<FileArgs> {
    let text = std::fs::read_to_string(path)?;
    let file: FileArgs = serde_json::from_str(&text).map_err(|e| {
        Error::InvalidConfig(format!("config file {}: {e}", path.display()))
    })?;
    if file.delta_l.is_some() && file.l_ratio.is_some() {
        return Err(Error::InvalidConfig(format!(
            "config file {} sets both delta-l and l-ratio",
            path.display()
        )));
    }
    Ok(file)
}

fn ratio_to_delta(r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidConfig(format!("l-ratio must be positive, got {r}")));
    }
    Ok(r.ln())
}

impl ModelArgs {
    /// Resolved configuration. `speed_fallback` stands in for a missing
    /// `--alpha-over-v` (used by sweeps over the speed).
    pub fn resolve(&self, speed_fallback: Option<f64>) -> Result<ModelConfig> {
        let file = match &self.config {
            Some(p) => read_file(p)?,
            None => FileArgs::default(),
        };
        let explicit = self.alpha_over_v.or(file.alpha_over_v);
        if explicit.is_none() && speed_fallback.is_none() {
            return Err(Error::InvalidConfig("--alpha-over-v is required".into()));
        }
        let delta_l = match (self.delta_l, self.l_ratio) {
            (Some(d), _) => d,
            (None, Some(r)) => ratio_to_delta(r)?,
            (None, None) => match (file.delta_l, file.l_ratio) {
                (Some(d), _) => d,
                (None, Some(r)) => ratio_to_delta(r)?,
                (None, None) => DEFAULT_DELTA_L,
            },
        };
        // A stand-in speed follows the direction of motion.
        let speed = explicit.unwrap_or_else(|| speed_fallback.unwrap().abs().copysign(delta_l));
        let cfg = ModelConfig {
            speed_ratio: speed,
            delta_l,
            cutoff: self.cutoff.or(file.cutoff).unwrap_or(DEFAULT_CUTOFF),
            theta0: self.theta0.or(file.theta0).unwrap_or(0.0),
            l_ref: self.l_ref.or(file.l_ref).unwrap_or(1.0),
            v_ref: self.v_ref.or(file.v_ref).unwrap_or(1.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
