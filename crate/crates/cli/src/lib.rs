//! Configuration, orchestration and output formatting for the `qwalk` binary.

pub mod config;
pub mod report;
pub mod reproduce;
pub mod run;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use report::{Artifact, Format, TableArtifact};
pub use run::{emit, run, Experiment, RunError};
