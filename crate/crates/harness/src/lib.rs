//! Library side of the `qrc` command: configuration, records, CSV and the
//! subcommand implementations.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod failure;
pub mod record;

pub use failure::Failure;
