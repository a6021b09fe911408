//! Command-line front end and file formats for `bgls-core`: expression
//! parsing, run configuration, CSV/JSON tables and the acceptance suite.

pub mod cli;
pub mod config;
pub mod expr;
pub mod output;
pub mod verify;
