//! Command implementations behind the `menzerath` binary. Each stage reads
//! and writes files so stages can be run, inspected and edited separately.

pub mod commands;
pub mod config;

pub use commands::{cmd_analyze, cmd_evaluate, cmd_fit, cmd_report, cmd_segment, FitReport};
pub use config::{Format, Mode, RunConfig};
