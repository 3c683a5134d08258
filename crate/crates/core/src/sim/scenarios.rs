//! The two belief-sharing failure scenarios on the default 3x5 world.

use crate::agent::ModalityMask;
use crate::comms::CommMode;
use crate::world::{ObjectPlacement, Visibility, WorldGraph};

use super::config::{AgentSpec, Movement, ScenarioConfig};
use super::trace::BeliefTrace;
use super::trial::{run_trial, SimError};

/// Nodes that carry the small prior bump in the echo-chamber scenario.
pub const ECHO_NODES: [usize; 2] = [11, 13];
/// Node the self-doubt agents strongly believe holds the object.
pub const SELF_DOUBT_NODE: usize = 1;

const ECHO_STARTS: [usize; 2] = [0, 4];
const ECHO_STEPS: usize = 10;
const SELF_DOUBT_STARTS: [usize; 4] = [0, 4, 10, 14];
const SELF_DOUBT_STEPS: usize = 15;
const SELF_DOUBT_MASS: f64 = 0.95;

/// Weight 2 on each bumped node and 1 elsewhere, normalized.
pub fn echo_chamber_prior(n: usize) -> Vec<f64> {
    let bumped = ECHO_NODES.iter().filter(|&&j| j < n).count();
    let total = (n + bumped) as f64;
    (0..n)
        .map(|j| (if ECHO_NODES.contains(&j) { 2.0 } else { 1.0 }) / total)
        .collect()
}

/// 0.95 on the believed node, the remainder spread uniformly.
pub fn self_doubt_prior(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let rest = (1.0 - SELF_DOUBT_MASS) / (n - 1) as f64;
    (0..n)
        .map(|j| {
            if j == SELF_DOUBT_NODE {
                SELF_DOUBT_MASS
            } else {
                rest
            }
        })
        .collect()
}

/// Two frozen agents that cannot see, only talk.
pub fn echo_chamber_config(mode: CommMode) -> ScenarioConfig {
    let graph = WorldGraph::default_world();
    let prior = echo_chamber_prior(graph.len());
    let agents = ECHO_STARTS
        .iter()
        .map(|&start| AgentSpec {
            start,
            prior: Some(prior.clone()),
        })
        .collect();
    let mut config = ScenarioConfig::new(graph, agents, mode);
    config.steps = ECHO_STEPS;
    config.movement = Movement::Frozen;
    config.modalities = ModalityMask {
        location: true,
        visibility: false,
    };
    config
}

/// Four free agents confident the object sits on node 1, where it is not.
pub fn self_doubt_config(mode: CommMode) -> ScenarioConfig {
    let graph = WorldGraph::default_world();
    let prior = self_doubt_prior(graph.len());
    let agents = SELF_DOUBT_STARTS
        .iter()
        .map(|&start| AgentSpec {
            start,
            prior: Some(prior.clone()),
        })
        .collect();
    let mut config = ScenarioConfig::new(graph, agents, mode);
    config.steps = SELF_DOUBT_STEPS;
    config.object = ObjectPlacement::Absent;
    config
}

/// Self-doubt with every agent parked on node 1 and every visibility draw forced to a miss.
pub fn self_doubt_scripted_config(mode: CommMode) -> ScenarioConfig {
    let mut config = self_doubt_config(mode);
    for agent in &mut config.agents {
        agent.start = SELF_DOUBT_NODE;
    }
    let k = config.agents.len();
    config.routes = Some(vec![vec![SELF_DOUBT_NODE; config.steps]; k]);
    config.forced_visibility = Some(vec![vec![Visibility::NotVisible; config.steps]; k]);
    config
}

pub fn scenario_echo_chamber(mode: CommMode) -> Result<BeliefTrace, SimError> {
    Ok(run_trial(&echo_chamber_config(mode))?.trace)
}

pub fn scenario_self_doubt(mode: CommMode) -> Result<BeliefTrace, SimError> {
    Ok(run_trial(&self_doubt_config(mode))?.trace)
}
