use thiserror::Error;

use crate::harness::SweepRow;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// `speed_ratio == 0` leaves `H = H~ alpha / l` undefined; a zero expansion
    /// must be short-circuited to the identity evolution by the caller.
    #[error("degenerate drive: speed ratio alpha/v is zero, the quadratic form is undefined")]
    DegenerateDrive,

    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(
        "ill-conditioned evolved transform at delta_l = {delta_l}, L = {cutoff}: \
         cond(u~) = {condition:.3e} exceeds 1e12"
    )]
    IllConditioned {
        delta_l: f64,
        cutoff: usize,
        condition: f64,
    },

    #[error("branch tracking of sqrt(det) exhausted at u = {u} after {depth} path halvings")]
    Branch { u: f64, depth: u32 },

    #[error("singular values of the pairing matrix do not pair up: {0:?}")]
    Pairing(Vec<f64>),

    #[error("size guard exceeded: {0}")]
    Size(String),

    #[error(
        "finite-difference mean {fd:.6e} disagrees with analytic mean {analytic:.6e} \
         (relative error {relative:.2e})"
    )]
    Consistency {
        fd: f64,
        analytic: f64,
        relative: f64,
    },

    #[error("fit failed: {message} (condition estimate {condition:.3e})")]
    Fit { message: String, condition: f64 },

    #[error("vacuum overlap <0|U|0> = {0:.3e} vanishes; pair amplitudes undefined")]
    DegenerateOverlap(f64),

    #[error("at {config}: {source}")]
    AtConfig {
        config: String,
        #[source]
        source: Box<Error>,
    },

    #[error("cutoff sweep aborted at L = {cutoff} after {} completed rows: {source}", completed.len())]
    SweepAborted {
        cutoff: usize,
        completed: Vec<SweepRow>,
        #[source]
        source: Box<Error>,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidConfig(_)
            | Error::Domain(_)
            | Error::DegenerateDrive
            | Error::Size(_) => true,
            Error::AtConfig { source, .. } | Error::SweepAborted { source, .. } => {
                source.is_validation()
            }
            _ => false,
        }
    }
}
