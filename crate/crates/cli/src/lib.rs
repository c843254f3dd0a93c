//! Library side of the `blcband` command-line tool: argument definitions,
//! data ingestion, file formats and the subcommands themselves.

pub mod args;
pub mod commands;
pub mod ingest;
pub mod output;

pub use commands::{run, Status};
