//! Benchmark harness: configuration, experiment grids, CSV and SVG output,
//! the self-test suite and the command-line entry point.

mod cli;
mod config;
mod experiment;
mod plot;
mod selftest;
mod table;

pub use cli::cli_main;
pub use config::{DatasetSpec, ExperimentConfig, HorizonSpec, MethodSpec};
pub use experiment::{load_dataset, run_experiment, run_experiment_with, trace_rows};
pub use plot::{emit_plot, render_svg, Metric};
pub use selftest::{run_self_tests, CheckOutcome};
pub use table::{emit_csv, read_csv, parse_csv, ResultRow, ResultTable, CSV_HEADER};
