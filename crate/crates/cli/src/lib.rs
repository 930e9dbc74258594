//! Experiment runner for complex fourth-moment bounds: configuration,
//! per-point bound reports, check batteries and the subcommands behind the
//! `cchaos` binary.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;

pub use error::{CliError, CliResult};
