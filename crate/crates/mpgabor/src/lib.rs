//! Command line, configuration and report files for `mpgabor-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::RunConfig;
pub use error::CliError;
