//! Command-line driver and file formats for `regenwalk-core`.
//!
//! The pipeline runs in five stages that communicate through an output
//! directory: `enumerate` writes exact count caches, `calibrate` turns the
//! irreducible counts into a step law, `sample` draws skeleton ensembles,
//! `analyze` fits the bridge covariance and the remaining statistics, and
//! `oracle` checks the small-`n` skeleton laws against each other.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
