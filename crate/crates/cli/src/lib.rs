//! Command-line front end for `symbif-core`: run configuration, report
//! payloads, the lattice cache format and the `k = 5` reference data.

pub mod cache;
pub mod commands;
pub mod config;
pub mod golden;
pub mod json;
pub mod report;

pub use config::{AlphaSpec, OutputFormat, RunConfig, Tolerances};
pub use report::{CliError, Exit, Report};
