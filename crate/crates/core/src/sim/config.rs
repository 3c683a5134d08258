use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::agent::ModalityMask;
use crate::comms::CommMode;
use crate::inference::STOCHASTIC_TOL;
use crate::planning::{DEFAULT_HORIZON, DEFAULT_POLICY_CAP, DEFAULT_VISIBLE_PREFERENCE};
use crate::world::{ObjectPlacement, Visibility, WorldGraph};

pub const DEFAULT_STEPS: usize = 20;
pub const DEFAULT_TEMPERATURE: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Movement {
    #[default]
    Free,
    /// Every agent stays on its start node.
    Frozen,
}

/// How agents pick actions when not frozen or scripted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Planner {
    #[default]
    ExpectedFreeEnergy,
    /// Uniformly random move actions, ignoring beliefs.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub start: usize,
    /// Object-location prior; uniform when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<f64>>,
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub graph: WorldGraph,
    pub agents: Vec<AgentSpec>,
    pub object: ObjectPlacement,
    pub comm_mode: CommMode,
    pub planner: Planner,
    pub horizon: usize,
    /// Trial length T.
    pub steps: usize,
    /// Scales `-G` inside the policy softmax.
    pub temperature: f64,
    pub seed: u64,
    pub modalities: ModalityMask,
    pub movement: Movement,
    pub visible_preference: f64,
    pub policy_cap: usize,
    /// Scripted actions per agent; missing entries mean "stay".
    pub routes: Option<Vec<Vec<usize>>>,
    /// Visibility outcomes that replace the sampled ones, per agent and step.
    pub forced_visibility: Option<Vec<Vec<Visibility>>>,
}

impl ScenarioConfig {
    /// A config with every documented default applied.
    pub fn new(graph: WorldGraph, agents: Vec<AgentSpec>, comm_mode: CommMode) -> Self {
        Self {
            graph,
            agents,
            object: ObjectPlacement::Absent,
            comm_mode,
            planner: Planner::default(),
            horizon: DEFAULT_HORIZON,
            steps: DEFAULT_STEPS,
            temperature: DEFAULT_TEMPERATURE,
            seed: DEFAULT_SEED,
            modalities: ModalityMask::default(),
            movement: Movement::default(),
            visible_preference: DEFAULT_VISIBLE_PREFERENCE,
            policy_cap: DEFAULT_POLICY_CAP,
            routes: None,
            forced_visibility: None,
        }
    }

    pub fn num_locations(&self) -> usize {
        self.graph.len()
    }

    /// The object prior of agent `i`, uniform when unspecified.
    pub fn agent_prior(&self, i: usize) -> Vec<f64> {
        let n = self.num_locations();
        self.agents[i]
            .prior
            .clone()
            .unwrap_or_else(|| vec![1.0 / n as f64; n])
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.num_locations();
        if self.agents.is_empty() {
            return Err(ConfigError::invalid(
                "agents",
                "at least one agent is required",
            ));
        }
        for (i, agent) in self.agents.iter().enumerate() {
            if agent.start >= n {
                return Err(ConfigError::invalid(
                    format!("agents[{i}].start"),
                    format!("node {} does not exist in a {n}-node graph", agent.start),
                ));
            }
            if let Some(prior) = &agent.prior {
                let field = format!("agents[{i}].prior");
                if prior.len() != n {
                    return Err(ConfigError::invalid(
                        field,
                        format!("expected {n} entries, got {}", prior.len()),
                    ));
                }
                if prior.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(ConfigError::invalid(field, "entries must be non-negative"));
                }
                let total: f64 = prior.iter().sum();
                if (total - 1.0).abs() > STOCHASTIC_TOL {
                    return Err(ConfigError::invalid(
                        field,
                        format!("entries sum to {total}, not 1"),
                    ));
                }
            }
        }
        if let ObjectPlacement::At(j) = self.object {
            if j >= n {
                return Err(ConfigError::invalid(
                    "object",
                    format!("node {j} does not exist in a {n}-node graph"),
                ));
            }
        }
        if self.steps == 0 {
            return Err(ConfigError::invalid(
                "steps",
                "trial length must be at least 1",
            ));
        }
        if self.horizon == 0 {
            return Err(ConfigError::invalid("horizon", "must be at least 1"));
        }
        if !self.temperature.is_finite() || self.temperature <= 0.0 {
            return Err(ConfigError::invalid(
                "temperature",
                "must be positive and finite",
            ));
        }
        if !self.visible_preference.is_finite() {
            return Err(ConfigError::invalid("visible_preference", "must be finite"));
        }
        if let Some(routes) = &self.routes {
            if routes.len() != self.agents.len() {
                return Err(ConfigError::invalid("routes", "need one route per agent"));
            }
            if let Some(bad) = routes.iter().flatten().find(|a| **a >= n) {
                return Err(ConfigError::invalid(
                    "routes",
                    format!("action {bad} out of range for {n} nodes"),
                ));
            }
        }
        if let Some(forced) = &self.forced_visibility {
            if forced.len() != self.agents.len() {
                return Err(ConfigError::invalid(
                    "forced_visibility",
                    "need one outcome list per agent",
                ));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
