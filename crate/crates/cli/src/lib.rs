//! File formats, presets and the command-line front end for
//! [`carleman_core`].

pub mod commands;
pub mod error;
pub mod format;
pub mod preset;

pub use commands::run;
pub use error::{exit, CliError, CliResult};
