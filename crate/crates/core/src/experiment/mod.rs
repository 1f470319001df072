//! Scenario files, sweeps and result emission.

mod config;
mod output;
mod sweep;

pub use config::{load_config, parse_config, ScenarioConfig, ScenarioParams};
pub use output::{csv_string, emit_csv, emit_plot_data, plot_data_string, CSV_HEADER};
pub use sweep::{linspace, run_sweep, run_sweep_with_threads, ResultRecord, SweepSpec};
