//! Experiment runner for the nexus solvers: configuration, seeded multi-run
//! execution, result files and comparison tables.

pub mod commands;
pub mod config;
pub mod io;
pub mod report;

pub use commands::{cmd_compare, cmd_front_dump, cmd_run, CompareOptions, DumpOptions, Format, Overrides};
pub use config::{ExperimentConfig, HvChoice};
