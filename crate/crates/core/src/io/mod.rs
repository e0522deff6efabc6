//! Configuration parsing and result emission.

pub mod config;
pub mod output;

pub use config::{emit_config, parse_config, ExperimentConfig, ExperimentKind};
pub use output::{emit_error, emit_results, write_atomic, write_timing, Report, ResultBundle, Status};
