//! Command-line front end: configuration, artifact writers, the individual
//! commands and the end-to-end `reproduce` run.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod points;
pub mod reproduce;
pub mod svg;
pub mod tables;

pub use commands::{run, Cli};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
