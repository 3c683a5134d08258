//! Policy evaluation by expected free energy and stochastic action selection.

mod efe;
mod rollout;
mod select;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inference::{InferenceError, ModalityId};

pub use efe::{evaluate_policies, expected_free_energy, PolicyEvaluator};
pub use rollout::{rollout_predict, PredictedStep, Rollout};
pub use select::{policy_distribution, select_action, select_action_greedy, select_policy};

/// Default cap on the number of enumerated policies.
pub const DEFAULT_POLICY_CAP: usize = 10_000;
pub const DEFAULT_HORIZON: usize = 2;
/// Default log-preference for a "visible" outcome, in nats.
pub const DEFAULT_VISIBLE_PREFERENCE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanningError {
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("empty input")]
    EmptyInput,
    #[error("{actions}^{horizon} policies exceed the cap of {cap}")]
    PolicySpaceTooLarge {
        actions: usize,
        horizon: usize,
        cap: usize,
    },
    #[error("temperature must be positive and finite, got {0}")]
    InvalidTemperature(f64),
    #[error("invalid preferences: {0}")]
    InvalidPreferences(String),
    #[error("policy action {action} out of range for {count} actions")]
    InvalidPolicy { action: usize, count: usize },
}

/// A fixed-length sequence of move actions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Policy {
    pub actions: Vec<usize>,
}

impl Policy {
    pub fn new(actions: Vec<usize>) -> Self {
        Self { actions }
    }

    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn first_action(&self) -> usize {
        self.actions[0]
    }
}

/// Every action sequence of length `horizon`, in lexicographic order.
pub fn enumerate_policies(
    actions: usize,
    horizon: usize,
    cap: usize,
) -> Result<Vec<Policy>, PlanningError> {
    if actions == 0 || horizon == 0 {
        return Err(PlanningError::EmptyInput);
    }
    let too_large = PlanningError::PolicySpaceTooLarge {
        actions,
        horizon,
        cap,
    };
    let count = u32::try_from(horizon)
        .ok()
        .and_then(|h| actions.checked_pow(h))
        .ok_or_else(|| too_large.clone())?;
    if count > cap {
        return Err(too_large);
    }
    let mut policies = Vec::with_capacity(count);
    let mut current = vec![0usize; horizon];
    for _ in 0..count {
        policies.push(Policy::new(current.clone()));
        for pos in (0..horizon).rev() {
            current[pos] += 1;
            if current[pos] < actions {
                break;
            }
            current[pos] = 0;
        }
    }
    Ok(policies)
}

/// Log-preferences over outcomes for the location and visibility modalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceModel {
    pub location: Vec<f64>,
    pub visibility: Vec<f64>,
}

impl PreferenceModel {
    /// Flat over locations; `visible` nats on the visible outcome, zero otherwise.
    pub fn seek_visible(num_locations: usize, visible: f64) -> Self {
        Self {
            location: vec![0.0; num_locations],
            visibility: vec![visible, 0.0],
        }
    }

    pub fn flat(num_locations: usize) -> Self {
        Self::seek_visible(num_locations, 0.0)
    }

    pub fn for_modality(&self, modality: ModalityId) -> Option<&[f64]> {
        match modality {
            ModalityId::Location => Some(&self.location),
            ModalityId::Visibility => Some(&self.visibility),
            ModalityId::Shared => None,
        }
    }

    pub fn validate(&self, num_locations: usize) -> Result<(), PlanningError> {
        if self.location.len() != num_locations || self.visibility.len() != 2 {
            return Err(PlanningError::InvalidPreferences(format!(
                "expected {num_locations} location and 2 visibility entries, got {} and {}",
                self.location.len(),
                self.visibility.len()
            )));
        }
        if self
            .location
            .iter()
            .chain(&self.visibility)
            .any(|c| !c.is_finite())
        {
            return Err(PlanningError::InvalidPreferences(
                "preferences must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Expected free energy of one policy, split into its two terms.
///
/// `g == -info_gain - utility`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfeBreakdown {
    pub policy: Policy,
    pub info_gain: f64,
    pub utility: f64,
    pub g: f64,
}

impl EfeBreakdown {
    pub fn new(policy: Policy, info_gain: f64, utility: f64) -> Self {
        Self {
            policy,
            info_gain,
            utility,
            g: -info_gain - utility,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts_and_order() {
        let p = enumerate_policies(2, 1, DEFAULT_POLICY_CAP).unwrap();
        assert_eq!(p, vec![Policy::new(vec![0]), Policy::new(vec![1])]);
        let p = enumerate_policies(3, 2, DEFAULT_POLICY_CAP).unwrap();
        assert_eq!(p.len(), 9);
        assert_eq!(p[0].actions, vec![0, 0]);
        assert_eq!(p[1].actions, vec![0, 1]);
        assert_eq!(p[8].actions, vec![2, 2]);
        assert_eq!(
            enumerate_policies(15, 2, DEFAULT_POLICY_CAP).unwrap().len(),
            225
        );
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(
            enumerate_policies(15, 4, DEFAULT_POLICY_CAP),
            Err(PlanningError::PolicySpaceTooLarge { .. })
        ));
        assert!(matches!(
            enumerate_policies(15, 400, DEFAULT_POLICY_CAP),
            Err(PlanningError::PolicySpaceTooLarge { .. })
        ));
        assert_eq!(enumerate_policies(0, 2, 10), Err(PlanningError::EmptyInput));
    }

    #[test]
    fn breakdown_identity() {
        let b = EfeBreakdown::new(Policy::new(vec![0]), 0.3, 1.1);
        assert_eq!(b.g, -0.3 - 1.1);
    }

    #[test]
    fn preference_validation() {
        assert!(PreferenceModel::seek_visible(4, 2.0).validate(4).is_ok());
        assert!(PreferenceModel::seek_visible(4, 2.0).validate(5).is_err());
        let mut p = PreferenceModel::flat(2);
        p.visibility[0] = f64::NAN;
        assert!(p.validate(2).is_err());
    }
}
