//! Library side of the `pmurel` binary: configuration, subcommands and
//! CSV output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
