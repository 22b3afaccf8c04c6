//! Library surface of the `isoproj` command-line tool: configuration
//! parsing, command dispatch, and the CSV/SVG writers. The binary in
//! `main.rs` is a thin argument-parsing shell over [`run::run`].

pub mod config;
pub mod csv;
pub mod run;
pub mod svg;

pub use config::{parse_config, Command, ConfigError, ExperimentConfig, Overrides, SetPreset};
pub use run::{run, RunError, RunOutcome};
