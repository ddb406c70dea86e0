//! File formats, report assembly and table benchmarks behind the `blockra`
//! binary.

pub mod bench;
pub mod cli;
pub mod commands;
pub mod io;

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
