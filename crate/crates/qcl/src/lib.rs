//! Command-line front end for `qcl-core`: run verifications, convergence
//! sweeps and the reproduction table, and write JSON or CSV reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod par;
pub mod report;
pub mod spec;

pub use config::{Format, RunConfig, Theorem};
pub use error::CliError;
