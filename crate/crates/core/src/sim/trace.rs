use serde::{Deserialize, Serialize};

use crate::comms::SharedMessage;
use crate::inference::LogMessage;
use crate::world::AgentObservation;

/// What one agent saw, believed and did at one timestep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub t: usize,
    pub agent: usize,
    pub position: usize,
    pub observation: AgentObservation,
    /// Object belief after communication.
    pub object_belief: Vec<f64>,
    pub location_belief: Vec<f64>,
    /// Object prior plus own likelihoods, max-normalized, before communication.
    pub local_object_logits: LogMessage,
    pub received: Vec<SharedMessage>,
    /// `None` on the step where the trial halted.
    pub action: Option<usize>,
}

/// Entries ordered by timestep, then agent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BeliefTrace {
    pub num_agents: usize,
    pub num_locations: usize,
    pub entries: Vec<TraceEntry>,
}

impl BeliefTrace {
    pub fn new(num_agents: usize, num_locations: usize) -> Self {
        Self {
            num_agents,
            num_locations,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, entry: TraceEntry) {
        self.entries.push(entry);
    }

    pub fn num_steps(&self) -> usize {
        self.entries.last().map_or(0, |e| e.t + 1)
    }

    pub fn get(&self, t: usize, agent: usize) -> Option<&TraceEntry> {
        self.entries.get(t * self.num_agents + agent)
    }

    pub fn for_agent(&self, agent: usize) -> impl Iterator<Item = &TraceEntry> {
        self.entries.iter().filter(move |e| e.agent == agent)
    }

    /// Object belief of `agent` at every recorded step.
    pub fn object_series(&self, agent: usize) -> Vec<Vec<f64>> {
        self.for_agent(agent)
            .map(|e| e.object_belief.clone())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
