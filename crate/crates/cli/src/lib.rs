//! Command-line front end: flag parsing, the four subcommands, SVG output.

pub mod config;
pub mod error;
pub mod run;
pub mod svg;
