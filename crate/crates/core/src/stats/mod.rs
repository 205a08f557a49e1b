//! Gaussian-state statistics of the evolved vacuum.

mod chi;
mod distribution;
mod moments;
mod pairing;
mod perturbative;

pub use chi::{char_number, char_values, char_work, BranchOptions, Observable};
pub use distribution::{
    number_distribution, number_distribution_dft, work_distribution, PAIRING_REL_TOL,
    WORK_DFT_GUARD,
};
pub use moments::{
    analytic_moments, mean_number_analytic, mean_work_analytic, moments_fd, wick_moments,
    FdMoments, FdOptions, FD_FLAG_TOL, FD_REJECT_TOL, FD_REL_FLOOR,
};
pub use pairing::{pairing_matrix, PairingState, MAX_CONDITION, SKEW_TOL};
pub use perturbative::perturbative_pair_amplitude;
