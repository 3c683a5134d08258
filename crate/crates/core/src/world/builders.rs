use crate::inference::{FactorId, LikelihoodTensor, ModalityId, TransitionTensor};

use super::{Visibility, WorldGraph};

/// Probability of observing one's true location.
pub const LOCATION_HIT: f64 = 0.99;
/// Probability of seeing the object when standing on its node.
pub const VISIBLE_HIT: f64 = 0.8;
/// Probability of a "visible" outcome anywhere else.
pub const VISIBLE_FALSE_ALARM: f64 = 0.2;

/// Movement dynamics: action `a` moves to node `a` when it is adjacent, otherwise the agent stays.
pub fn build_b1(graph: &WorldGraph) -> TransitionTensor {
    let n = graph.len();
    let mut table = vec![0.0; n * n * n];
    for prev in 0..n {
        for action in 0..n {
            let next = graph.move_target(prev, action);
            table[(next * n + prev) * n + action] = 1.0;
        }
    }
    TransitionTensor::new(FactorId::Location, n, n, table).expect("B1 columns are one-hot")
}

/// Static object dynamics.
pub fn build_b2(n: usize) -> TransitionTensor {
    TransitionTensor::identity(FactorId::Object, n)
}

/// Near-identity location observation. Off-diagonal mass is split evenly.
pub fn build_a1(n: usize) -> LikelihoodTensor {
    let table = if n == 1 {
        vec![1.0]
    } else {
        let off = (1.0 - LOCATION_HIT) / (n - 1) as f64;
        let mut table = vec![off; n * n];
        for i in 0..n {
            table[i * n + i] = LOCATION_HIT;
        }
        table
    };
    LikelihoodTensor::new(
        ModalityId::Location,
        n,
        vec![(FactorId::Location, n)],
        table,
    )
    .expect("A1 columns are stochastic")
}

/// Visibility observation, conditioned on (agent location, object location).
pub fn build_a2(n: usize) -> LikelihoodTensor {
    let mut table = vec![0.0; 2 * n * n];
    for i in 0..n {
        for j in 0..n {
            let (visible, hidden) = if i == j {
                (VISIBLE_HIT, VISIBLE_FALSE_ALARM)
            } else {
                (VISIBLE_FALSE_ALARM, VISIBLE_HIT)
            };
            table[Visibility::Visible.index() * n * n + i * n + j] = visible;
            table[Visibility::NotVisible.index() * n * n + i * n + j] = hidden;
        }
    }
    LikelihoodTensor::new(
        ModalityId::Visibility,
        2,
        vec![(FactorId::Location, n), (FactorId::Object, n)],
        table,
    )
    .expect("A2 slices are stochastic")
}
