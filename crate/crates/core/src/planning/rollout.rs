use crate::agent::GenerativeModel;
use crate::inference::{CategoricalBelief, FactorId, LikelihoodTensor};

use super::{PlanningError, Policy};

/// Predicted beliefs and outcome distributions at one future step.
#[derive(Debug, Clone)]
pub struct PredictedStep {
    pub location: CategoricalBelief,
    pub object: CategoricalBelief,
    pub location_obs: Vec<f64>,
    pub visibility_obs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Rollout {
    pub steps: Vec<PredictedStep>,
}

/// Distribution over outcomes of `a` given factor beliefs, `sum_s A[o, s] prod q(s)`.
pub(crate) fn predict_outcomes(a: &LikelihoodTensor, location: &[f64], object: &[f64]) -> Vec<f64> {
    let joint = parent_joint(a, location, object);
    (0..a.outcomes())
        .map(|o| {
            joint
                .iter()
                .enumerate()
                .map(|(config, q)| a.prob(o, config) * q)
                .sum()
        })
        .collect()
}

/// Joint belief over the parent configurations of `a` under the mean-field factorization.
pub(crate) fn parent_joint(a: &LikelihoodTensor, location: &[f64], object: &[f64]) -> Vec<f64> {
    let mut joint = vec![1.0];
    for (factor, dim) in a.parents() {
        let q = match factor {
            FactorId::Location => location,
            FactorId::Object => object,
        };
        debug_assert_eq!(q.len(), *dim);
        joint = joint
            .iter()
            .flat_map(|prefix| q.iter().map(move |p| prefix * p))
            .collect();
    }
    joint
}

/// Pushes the current beliefs through the dynamics along `policy`.
pub fn rollout_predict(
    model: &GenerativeModel,
    location: &CategoricalBelief,
    object: &CategoricalBelief,
    policy: &Policy,
) -> Result<Rollout, PlanningError> {
    if policy.actions.is_empty() {
        return Err(PlanningError::EmptyInput);
    }
    let mut loc = location.probs().to_vec();
    let mut obj = object.probs().to_vec();
    let mut steps = Vec::with_capacity(policy.horizon());
    for &action in &policy.actions {
        if action >= model.num_actions() {
            return Err(PlanningError::InvalidPolicy {
                action,
                count: model.num_actions(),
            });
        }
        loc = model.b_location.propagate(&loc, action)?;
        obj = model.b_object.propagate(&obj, 0)?;
        steps.push(PredictedStep {
            location_obs: predict_outcomes(&model.a_location, &loc, &obj),
            visibility_obs: predict_outcomes(&model.a_visibility, &loc, &obj),
            location: CategoricalBelief::from_weights(FactorId::Location, &loc)?,
            object: CategoricalBelief::from_weights(FactorId::Object, &obj)?,
        });
    }
    Ok(Rollout { steps })
}
