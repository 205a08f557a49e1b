//! Work and particle-number statistics of a massless Dirac field in a
//! one-dimensional box whose wall moves at constant speed.
//!
//! The pipeline is [`model::build_quadratic_form`] ->
//! [`bogoliubov::diagonalize`] -> [`bogoliubov::evolve`] ->
//! [`stats::pairing_matrix`] -> characteristic functions, moments and
//! distributions. [`oracle`] recomputes everything on the full Fock space
//! for small cutoffs.

pub mod bogoliubov;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod stats;

pub use error::{Error, Result};
pub use model::ModelConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
