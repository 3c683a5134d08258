//! Trial loop, canonical scenarios and the find-rate sweep.

mod config;
mod scenarios;
mod sweep;
mod trace;
mod trial;

pub use config::{AgentSpec, ConfigError, Movement, Planner, ScenarioConfig};
pub use scenarios::{
    echo_chamber_config, echo_chamber_prior, scenario_echo_chamber, scenario_self_doubt,
    self_doubt_config, self_doubt_prior, self_doubt_scripted_config, ECHO_NODES, SELF_DOUBT_NODE,
};
pub use sweep::{
    run_sweep, sweep_trial_count, AggregateRow, SweepArm, SweepError, SweepOptions, SweepReport,
    TrialRow, DEFAULT_SWEEP_CAP,
};
pub use trace::{BeliefTrace, TraceEntry};
pub use trial::{run_trial, simulate, SimError, TraceLevel, TrialResult};
