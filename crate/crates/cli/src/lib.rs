//! Command-line front end for `rbfbvp`.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;
pub mod reference;

pub use args::Cli;
pub use commands::{run, Artifact};
pub use error::CliError;
pub use manifest::RunManifest;
