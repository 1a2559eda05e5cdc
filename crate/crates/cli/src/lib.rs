//! Batch driver for the `sgkink` experiment recipes.
//!
//! A run is described by an [`ExperimentConfig`] (TOML, `version = 1`),
//! executed by [`commands::run`] and written out by [`output`] as a JSON
//! summary, one CSV per table and SVG line plots.

pub mod commands;
pub mod config;
pub mod output;
pub mod plot;

pub use commands::{run, Command, Outcome};
pub use config::{ConfigError, ExperimentConfig};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const SOLVER: i32 = 3;
}
