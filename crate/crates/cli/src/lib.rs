//! File formats and command plumbing for the `regsel` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod svg;

pub use config::{parse_config, parse_config_str};
pub use error::CliError;
pub use output::{write_run_outputs, OutputBundle};
