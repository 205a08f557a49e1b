//! Mode functions, spectra, the coupling matrix and the quadratic generator.

mod config;
mod coupling;
mod form;
mod modes;

pub use config::{ModeLayout, ModelConfig};
pub use coupling::{coupling_element, coupling_quadrature};
pub use form::{build_quadratic_form, QuadraticForm};
pub use modes::{bag_condition_residual, mode_frequency, mode_function, Spinor};
