//! File formats, parallel drivers and the command-line front end on top of
//! [`advrobust_core`].
//!
//! The binary `advrobust` exposes four commands: `running-example`,
//! `analyze`, `concentration` and `volume`. Each writes CSV curve data and,
//! where structured, a JSON report into `--out`.

pub mod cli;
pub mod commands;
pub mod dataset;
mod error;
pub mod model;
pub mod parallel;
pub mod report;

pub use error::{CliError, Result};
