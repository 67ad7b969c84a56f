//! Driver for the flopcheck command-line tool.

pub mod commands;
pub mod config;
pub mod numeric;
pub mod report;
pub mod suites;

pub use commands::{run_from, Outcome};
