use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::inference::LikelihoodTensor;
use crate::rng::sample_index;

use super::{build_a1, build_a2, Visibility, WorldGraph, VISIBLE_FALSE_ALARM};

/// Where the object is hidden. `Absent` makes every node a miss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PlacementRepr", into = "PlacementRepr")]
pub enum ObjectPlacement {
    At(usize),
    Absent,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PlacementRepr {
    Node(usize),
    Word(String),
}

impl TryFrom<PlacementRepr> for ObjectPlacement {
    type Error = String;

    fn try_from(repr: PlacementRepr) -> Result<Self, Self::Error> {
        match repr {
            PlacementRepr::Node(n) => Ok(ObjectPlacement::At(n)),
            PlacementRepr::Word(w) if w == "absent" => Ok(ObjectPlacement::Absent),
            PlacementRepr::Word(w) => Err(format!(
                "object must be a node index or \"absent\", got \"{w}\""
            )),
        }
    }
}

impl From<ObjectPlacement> for PlacementRepr {
    fn from(p: ObjectPlacement) -> Self {
        match p {
            ObjectPlacement::At(n) => PlacementRepr::Node(n),
            ObjectPlacement::Absent => PlacementRepr::Word("absent".into()),
        }
    }
}

impl fmt::Display for ObjectPlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectPlacement::At(n) => write!(f, "{n}"),
            ObjectPlacement::Absent => f.write_str("absent"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldState {
    pub agent_positions: Vec<usize>,
    pub object: ObjectPlacement,
    pub t: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentObservation {
    pub location: usize,
    pub visibility: Visibility,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationBundle {
    pub per_agent: Vec<AgentObservation>,
}

/// Ground truth: the graph plus the observation tensors used to generate outcomes.
#[derive(Debug, Clone)]
pub struct Environment {
    pub graph: WorldGraph,
    pub a_location: LikelihoodTensor,
    pub a_visibility: LikelihoodTensor,
}

impl Environment {
    pub fn new(graph: WorldGraph) -> Self {
        let n = graph.len();
        Self {
            graph,
            a_location: build_a1(n),
            a_visibility: build_a2(n),
        }
    }

    pub fn num_locations(&self) -> usize {
        self.graph.len()
    }

    /// Outcome distribution `[P(visible), P(not visible)]` for an agent at `position`.
    pub fn visibility_distribution(&self, position: usize, object: ObjectPlacement) -> [f64; 2] {
        match object {
            ObjectPlacement::At(j) => {
                let config = self.a_visibility.config_index(&[position, j]);
                [
                    self.a_visibility.prob(Visibility::Visible.index(), config),
                    self.a_visibility
                        .prob(Visibility::NotVisible.index(), config),
                ]
            }
            ObjectPlacement::Absent => [VISIBLE_FALSE_ALARM, 1.0 - VISIBLE_FALSE_ALARM],
        }
    }
}

/// Moves every agent to its action target when adjacent. The object never moves.
pub fn env_step(state: &WorldState, actions: &[usize], graph: &WorldGraph) -> WorldState {
    assert_eq!(
        actions.len(),
        state.agent_positions.len(),
        "one action per agent"
    );
    WorldState {
        agent_positions: state
            .agent_positions
            .iter()
            .zip(actions)
            .map(|(pos, a)| graph.move_target(*pos, *a))
            .collect(),
        object: state.object,
        t: state.t + 1,
    }
}

/// Samples one location and one visibility outcome per agent, in agent order.
pub fn env_observe<R: Rng + ?Sized>(
    env: &Environment,
    state: &WorldState,
    rng: &mut R,
) -> ObservationBundle {
    let per_agent = state
        .agent_positions
        .iter()
        .map(|&pos| {
            let location = sample_index(&env.a_location.column(pos), rng);
            let vis = env.visibility_distribution(pos, state.object);
            let visibility =
                Visibility::from_index(sample_index(&vis, rng)).expect("two visibility outcomes");
            AgentObservation {
                location,
                visibility,
            }
        })
        .collect();
    ObservationBundle { per_agent }
}
