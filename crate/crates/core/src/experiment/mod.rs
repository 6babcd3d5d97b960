//! Experiment configuration, sweeps, calibration and report files.

mod calibrate;
mod config;
pub mod output;
mod runner;
mod sweep;
mod validate;

pub use calibrate::{anchor_slope, calibrate, CalibrationResult, CalibrationStep};
pub use config::{CalibrationConfig, ExperimentConfig, SweepAxis, TrafficTemplate};
pub use runner::{run_experiment, write_run_reports};
pub use sweep::{
    read_sweep_csv, run_sweep, summarize, sweep_csv, write_sweep, PointSummary, PolicySummary,
    Spread, SweepKind, SweepOutcome, SweepRow, SweepSummary,
};
pub use validate::{
    random_instances, relative_gap, validate_power, validate_power_with, validation_params,
    GapRecord, PowerInstance, ValidationReport,
};
