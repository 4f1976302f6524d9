//! Experiment runner for the `needlecomp` library.

pub mod config;
pub mod emit;
pub mod runner;

pub use config::{
    parse_config, Check, ConfigError, Expectation, ExperimentConfig, Format, RawConfig,
};
pub use emit::{emit, render};
pub use runner::{run, Outcome, Row, RunError};
