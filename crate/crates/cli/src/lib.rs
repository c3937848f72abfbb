//! Command-line front end: argument parsing, label parsing, commands and
//! output rendering. The binary in `main.rs` only dispatches.

pub mod args;
pub mod commands;
pub mod error;
pub mod level;
pub mod output;

pub use error::CliError;
