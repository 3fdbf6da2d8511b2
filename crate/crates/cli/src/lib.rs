//! Command-line front end for `curved-nbody`: JSON run configs, CSV
//! trajectories and diagnostics, equilibrium solving and certification
//! suites.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod suites;

pub use error::CliError;
