//! Presets, the end-to-end Monte Carlo pipeline and the command implementations.

pub mod commands;
pub mod config;
pub mod pipeline;

pub use commands::{
    cmd_analyze, cmd_calibrate_coupler, cmd_simulate, cmd_sweep_power, cmd_sweep_pump,
    AnalyzeReport, CouplerReport, PowerSweepReport, PowerSweepRow, PumpSweepReport, PumpSweepRow,
    SimulateReport,
};
pub use config::{ExperimentConfig, PRESETS};
pub use pipeline::{point_rng, simulate_point, simulate_scan, to_dataset, PointResult, Setup};
