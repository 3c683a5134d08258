//! Shared inputs for the benchmarks.

use beliefshare_core::sim::{AgentSpec, ScenarioConfig};
use beliefshare_core::world::ObjectPlacement;
use beliefshare_core::{CategoricalBelief, CommMode, FactorId, WorldGraph};

/// Two agents on the default world searching for an object on node 12.
pub fn search_config(mode: CommMode) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(
        WorldGraph::default_world(),
        vec![
            AgentSpec {
                start: 0,
                prior: None,
            },
            AgentSpec {
                start: 4,
                prior: None,
            },
        ],
        mode,
    );
    c.object = ObjectPlacement::At(12);
    c.temperature = 16.0;
    c
}

/// A non-uniform object belief over `n` nodes.
pub fn skewed_belief(n: usize) -> CategoricalBelief {
    let weights: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
    CategoricalBelief::from_weights(FactorId::Object, &weights).expect("positive weights")
}
