//! Sweeps over cutoff and drive speed, scaling fits and CSV output.

mod fit;
mod report;
mod speed;
mod sweep;

pub use fit::{fit_scaling, fit_scaling_with, FitOptions, FitResult, DEFAULT_MIN_CUTOFF, MAX_FIT_CONDITION, MIN_FIT_ROWS};
pub use report::{
    prepare_state, run_point, run_point_with, FdCheck, Method, Moment, MomentReport, RunOptions, WORK_UNIT,
};
pub use speed::{
    default_cutoffs, default_speeds, sweep_speed, SpeedFailure, SpeedRow, SpeedSweep, SPEED_HEADER,
};
pub use sweep::{format_float, sweep_cutoff, SweepRow, SweepTable, SWEEP_HEADER};
