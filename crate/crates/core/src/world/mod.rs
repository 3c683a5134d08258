//! The ground-truth environment and the canonical tensors of the graph world.

mod builders;
mod env;
mod graph;

pub use builders::{
    build_a1, build_a2, build_b1, build_b2, LOCATION_HIT, VISIBLE_FALSE_ALARM, VISIBLE_HIT,
};
pub use env::{
    env_observe, env_step, AgentObservation, Environment, ObjectPlacement, ObservationBundle,
    WorldState,
};
pub use graph::{GraphError, WorldGraph};

use serde::{Deserialize, Serialize};

/// Outcome of the visibility modality. Outcome index 0 is "visible".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    Visible,
    NotVisible,
}

impl Visibility {
    pub const fn index(self) -> usize {
        match self {
            Visibility::Visible => 0,
            Visibility::NotVisible => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Visibility::Visible),
            1 => Some(Visibility::NotVisible),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Visibility::Visible => "visible",
            Visibility::NotVisible => "not_visible",
        }
    }
}
