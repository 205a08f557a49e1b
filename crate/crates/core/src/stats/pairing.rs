use faer::linalg::solvers::Solve;
use faer::{c64, Mat};

use crate::bogoliubov::EvolvedTransform;
use crate::error::{Error, Result};
use crate::linalg::{log_det, max_abs, skew_defect, CMat};
use crate::model::ModelConfig;

/// Largest acceptable condition number of `u~`.
pub const MAX_CONDITION: f64 = 1e12;
/// Bound on `max |G + G^T|` before antisymmetrization.
pub const SKEW_TOL: f64 = 1e-8;

/// The evolved vacuum written as a fermionic Gaussian state,
/// `U|0> = K exp(1/2 sum G_mn c_m^dag c_n^dag) |0>`.
#[derive(Debug, Clone)]
pub struct PairingState {
    /// Skew-symmetric pairing matrix.
    pub g: CMat,
    /// `|n + 1/2|` per index, in units of `pi v / l_final`.
    pub freq_abs: Vec<f64>,
    /// `ln det(1 + G^dag G)`.
    pub log_norm_det: f64,
    /// `<0| c~_n^dag c~_n |0> = (v~ v~^dag)_nn`.
    pub occupation: Vec<f64>,
    /// 2-norm condition number of `u~`.
    pub condition: f64,
    /// `max |G + G^T|` of the solved matrix before antisymmetrization.
    pub skew_defect: f64,
}

impl PairingState {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `det(1 + G^dag G) >= 1`.
    pub fn norm_det(&self) -> f64 {
        self.log_norm_det.exp()
    }

    pub fn mean_number(&self) -> f64 {
        self.occupation.iter().sum()
    }

    pub fn mean_work(&self) -> f64 {
        self.occupation
            .iter()
            .zip(&self.freq_abs)
            .map(|(o, w)| o * w)
            .sum()
    }
}

/// Solves `u~^dag G = -v~^T` for the pairing matrix (LU with partial
/// pivoting, no explicit inverse). This is the relation under which
/// `U c U^dag = u~^dag c + v~^T c^dag` annihilates the Gaussian state.
pub fn pairing_matrix(t: &EvolvedTransform, config: &ModelConfig) -> Result<PairingState> {
    let n = t.dim();
    if n != config.modes() {
        return Err(Error::InvalidConfig(format!(
            "transform has {n} modes but the configuration has {}",
            config.modes()
        )));
    }
    let freq_abs = config.layout().abs_frequencies();
    let occupation: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|k| t.v_t[(i, k)].norm_sqr()).sum())
        .collect();

    if max_abs(t.v_t.as_ref()) == 0.0 {
        return Ok(PairingState {
            g: Mat::zeros(n, n),
            freq_abs,
            log_norm_det: 0.0,
            occupation,
            condition: 1.0,
            skew_defect: 0.0,
        });
    }

    let singular = t
        .u_t
        .singular_values()
        .map_err(|e| Error::Numerical(format!("SVD of u~ failed: {e:?}")))?;
    let (smax, smin) = (singular[0], *singular.last().unwrap());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned {
            delta_l: t.delta_l,
            cutoff: config.cutoff,
            condition,
        });
    }

    let u_dag = t.u_t.adjoint().to_owned();
    let mut g = Mat::from_fn(n, n, |i, j| -t.v_t[(j, i)]);
    u_dag.partial_piv_lu().solve_in_place(g.as_mut());

    let defect = skew_defect(g.as_ref());
    if defect > SKEW_TOL {
        return Err(Error::Numerical(format!(
            "pairing matrix is not skew-symmetric: max |G + G^T| = {defect:.3e}"
        )));
    }
    let g = Mat::from_fn(n, n, |i, j| 0.5 * (g[(i, j)] - g[(j, i)]));

    let gram = g.adjoint() * &g + Mat::<c64>::identity(n, n);
    let log_norm_det = log_det(gram.as_ref()).re;
    Ok(PairingState {
        g,
        freq_abs,
        log_norm_det,
        occupation,
        condition,
        skew_defect: defect,
    })
}
