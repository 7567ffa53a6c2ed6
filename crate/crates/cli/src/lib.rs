//! Library surface of the command-line front end: the subcommands, the
//! dataset file codec, and the run-config schema. The `optchoice` binary is
//! a thin wrapper over this.

pub mod commands;
pub mod dataset_io;
pub mod error;
pub mod run_config;
