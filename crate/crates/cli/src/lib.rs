//! Scenario runner behind the `atomscatter` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

pub use config::{Mode, RawConfig, ScenarioConfig, SweepRange};
pub use error::CliError;
pub use scenario::{run_scenario, run_sweep, RunReport};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "ATOMSCATTER_THREADS";
