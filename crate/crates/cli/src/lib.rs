//! Command-line harness: experiment configs, subcommands with reproducible
//! CSV output, and the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod exit;
pub mod record;
