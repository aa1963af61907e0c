//! Command-line front end for `acorbfn-core`: config files, CSV and
//! network formats, SVG plots and the four workflows.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod plot;

pub use error::CliError;
