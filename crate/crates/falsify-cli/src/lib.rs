//! Library side of the experiment runner: configuration parsing, report
//! assembly, and the scenario implementations behind each subcommand.

pub mod config;
pub mod report;
pub mod scenarios;
