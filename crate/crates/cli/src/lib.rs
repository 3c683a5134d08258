//! Scenario and sweep runner for the `beliefshare` command.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_scenario, cmd_sweep, ScenarioName, SweepRequest, MANIFEST_FILE};
pub use config::{parse_config, parse_config_str, to_toml, ParsedConfig};
pub use error::CliError;
pub use output::{fmt_float, RunManifest};
