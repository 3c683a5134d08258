use std::collections::HashMap;

use crate::agent::GenerativeModel;
use crate::inference::{entropy, kl_divergence, CategoricalBelief, FactorId, LikelihoodTensor};

use super::rollout::{parent_joint, predict_outcomes};
use super::{rollout_predict, EfeBreakdown, PlanningError, Policy, PreferenceModel};

/// Information gain and utility contributed by one modality at one step.
///
/// Information gain is computed literally: for every outcome, the exact Bayes
/// posterior over the parent states and its KL divergence from the predicted
/// state belief, weighted by the predicted outcome probability.
fn modality_terms(
    a: &LikelihoodTensor,
    location: &[f64],
    object: &[f64],
    preferences: &[f64],
) -> (f64, f64) {
    let joint = parent_joint(a, location, object);
    let outcomes = predict_outcomes(a, location, object);
    let mut info_gain = 0.0;
    for (o, q_o) in outcomes.iter().enumerate() {
        if *q_o <= 0.0 {
            continue;
        }
        let posterior: Vec<f64> = joint
            .iter()
            .enumerate()
            .map(|(config, q)| a.prob(o, config) * q / q_o)
            .collect();
        info_gain += q_o * kl_divergence(&posterior, &joint);
    }
    let utility = outcomes.iter().zip(preferences).map(|(q, c)| q * c).sum();
    (info_gain, utility)
}

/// Expected free energy of one policy via an explicit rollout.
///
/// Sums over the location and visibility modalities. The shared channel is not
/// predicted.
pub fn expected_free_energy(
    model: &GenerativeModel,
    location: &CategoricalBelief,
    object: &CategoricalBelief,
    policy: &Policy,
    prefs: &PreferenceModel,
) -> Result<EfeBreakdown, PlanningError> {
    prefs.validate(model.num_locations())?;
    let rollout = rollout_predict(model, location, object, policy)?;
    let mut info_gain = 0.0;
    let mut utility = 0.0;
    for step in &rollout.steps {
        for (a, c) in [
            (&model.a_location, &prefs.location),
            (&model.a_visibility, &prefs.visibility),
        ] {
            let (ig, u) = modality_terms(a, step.location.probs(), step.object.probs(), c);
            info_gain += ig;
            utility += u;
        }
    }
    Ok(EfeBreakdown::new(policy.clone(), info_gain, utility))
}

/// One modality reduced onto the location factor for a fixed object belief.
struct LocationReduction {
    // outcome-major: response[o * n + i] = P(o | location i)
    response: Vec<f64>,
    // Expected outcome entropy given location i.
    conditional_entropy: Vec<f64>,
    preferences: Vec<f64>,
    outcomes: usize,
}

impl LocationReduction {
    fn new(a: &LikelihoodTensor, object: &[f64], preferences: &[f64]) -> Self {
        let parents = a.parents();
        let loc_pos = a
            .parent_position(FactorId::Location)
            .expect("planned modalities depend on the agent location");
        let n = parents[loc_pos].1;
        let mut response = vec![0.0; a.outcomes() * n];
        let mut conditional_entropy = vec![0.0; n];
        let mut index = vec![0usize; parents.len()];
        for config in 0..a.parent_configs() {
            let mut weight = 1.0;
            for (pos, (factor, _)) in parents.iter().enumerate() {
                if *factor == FactorId::Object {
                    weight *= object[index[pos]];
                }
            }
            let i = index[loc_pos];
            if weight != 0.0 {
                for o in 0..a.outcomes() {
                    response[o * n + i] += weight * a.prob(o, config);
                }
                conditional_entropy[i] += weight * a.column_entropy(config);
            }
            for pos in (0..parents.len()).rev() {
                index[pos] += 1;
                if index[pos] < parents[pos].1 {
                    break;
                }
                index[pos] = 0;
            }
        }
        Self {
            response,
            conditional_entropy,
            preferences: preferences.to_vec(),
            outcomes: a.outcomes(),
        }
    }

    /// Mutual information between outcome and state, `H[Q(o)] - E_q H[A(.|s)]`, and utility.
    fn terms(&self, location: &[f64], scratch: &mut Vec<f64>) -> (f64, f64) {
        let n = location.len();
        scratch.clear();
        scratch.extend((0..self.outcomes).map(|o| {
            self.response[o * n..(o + 1) * n]
                .iter()
                .zip(location)
                .map(|(r, q)| r * q)
                .sum::<f64>()
        }));
        let expected_entropy: f64 = self
            .conditional_entropy
            .iter()
            .zip(location)
            .map(|(h, q)| h * q)
            .sum();
        let info_gain = (entropy(scratch) - expected_entropy).max(0.0);
        let utility = scratch
            .iter()
            .zip(&self.preferences)
            .map(|(q, c)| q * c)
            .sum();
        (info_gain, utility)
    }
}

/// Evaluates many policies from the same beliefs, sharing work across common prefixes.
///
/// Uses the identity `E_o KL[Q(s|o) || Q(s)] = H[Q(o)] - E_s H[P(o|s)]` and the
/// fact that the object belief does not depend on the chosen moves.
pub struct PolicyEvaluator<'m> {
    model: &'m GenerativeModel,
    location: Vec<f64>,
    // Per future step: one reduction per planned modality.
    reductions: Vec<[LocationReduction; 2]>,
    prefix_cache: HashMap<Vec<usize>, (Vec<f64>, f64, f64)>,
}

impl<'m> PolicyEvaluator<'m> {
    pub fn new(
        model: &'m GenerativeModel,
        location: &CategoricalBelief,
        object: &CategoricalBelief,
        prefs: &PreferenceModel,
        horizon: usize,
    ) -> Result<Self, PlanningError> {
        prefs.validate(model.num_locations())?;
        let mut obj = object.probs().to_vec();
        let mut reductions = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            obj = model.b_object.propagate(&obj, 0)?;
            reductions.push([
                LocationReduction::new(&model.a_location, &obj, &prefs.location),
                LocationReduction::new(&model.a_visibility, &obj, &prefs.visibility),
            ]);
        }
        Ok(Self {
            model,
            location: location.probs().to_vec(),
            reductions,
            prefix_cache: HashMap::new(),
        })
    }

    pub fn evaluate(&mut self, policy: &Policy) -> Result<EfeBreakdown, PlanningError> {
        if policy.actions.is_empty() {
            return Err(PlanningError::EmptyInput);
        }
        if policy.horizon() > self.reductions.len() {
            return Err(PlanningError::InvalidPolicy {
                action: policy.horizon(),
                count: self.reductions.len(),
            });
        }
        let mut scratch = Vec::new();
        let mut info_gain = 0.0;
        let mut utility = 0.0;
        for tau in 0..policy.horizon() {
            let key = &policy.actions[..=tau];
            if let Some((_, ig, u)) = self.prefix_cache.get(key) {
                info_gain = *ig;
                utility = *u;
                continue;
            }
            let action = policy.actions[tau];
            if action >= self.model.num_actions() {
                return Err(PlanningError::InvalidPolicy {
                    action,
                    count: self.model.num_actions(),
                });
            }
            let prev = if tau == 0 {
                &self.location
            } else {
                &self.prefix_cache[&policy.actions[..tau]].0
            };
            let loc = self.model.b_location.propagate(prev, action)?;
            for reduction in &self.reductions[tau] {
                let (ig, u) = reduction.terms(&loc, &mut scratch);
                info_gain += ig;
                utility += u;
            }
            self.prefix_cache
                .insert(key.to_vec(), (loc, info_gain, utility));
        }
        Ok(EfeBreakdown::new(policy.clone(), info_gain, utility))
    }
}

/// Expected free energy for every policy in `policies`.
pub fn evaluate_policies(
    model: &GenerativeModel,
    location: &CategoricalBelief,
    object: &CategoricalBelief,
    policies: &[Policy],
    prefs: &PreferenceModel,
) -> Result<Vec<EfeBreakdown>, PlanningError> {
    let horizon = policies.iter().map(Policy::horizon).max().unwrap_or(0);
    let mut evaluator = PolicyEvaluator::new(model, location, object, prefs, horizon)?;
    policies.iter().map(|p| evaluator.evaluate(p)).collect()
}
