//! Experiment runner for the ao-gibbs toolkit: spec files, subcommands,
//! CSV tables, snapshots, manifests and the verification suites.

pub mod checks;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod snapshot;
pub mod spec;
pub mod table;

pub use error::CliError;
