//! Command-line front end of the `apme` laboratory: experiment configs,
//! subcommand implementations and output writing.

pub mod commands;
pub mod config;
