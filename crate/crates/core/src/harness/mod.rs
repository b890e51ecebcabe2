//! Experiment harness: configs, initial data, manufactured solutions, output
//! and the drivers behind the command line.

pub mod config;
pub mod experiments;
pub mod initial;
pub mod manufactured;
pub mod output;
pub mod rng;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::run_experiment;
