use rand::Rng;

use crate::inference::softmax;
use crate::rng::sample_index;

use super::{EfeBreakdown, PlanningError};

/// `softmax(-temperature * G)` over the given policies.
pub fn policy_distribution(
    efes: &[EfeBreakdown],
    temperature: f64,
) -> Result<Vec<f64>, PlanningError> {
    if efes.is_empty() {
        return Err(PlanningError::EmptyInput);
    }
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(PlanningError::InvalidTemperature(temperature));
    }
    let logits: Vec<f64> = efes.iter().map(|e| -temperature * e.g).collect();
    Ok(softmax(&logits)?)
}

/// Samples a policy index from [`policy_distribution`].
pub fn select_policy<R: Rng + ?Sized>(
    efes: &[EfeBreakdown],
    temperature: f64,
    rng: &mut R,
) -> Result<usize, PlanningError> {
    let probs = policy_distribution(efes, temperature)?;
    Ok(sample_index(&probs, rng))
}

/// Samples a policy and returns its first action.
pub fn select_action<R: Rng + ?Sized>(
    efes: &[EfeBreakdown],
    temperature: f64,
    rng: &mut R,
) -> Result<usize, PlanningError> {
    let index = select_policy(efes, temperature, rng)?;
    Ok(efes[index].policy.first_action())
}

/// First action of the lowest-G policy; ties go to the earliest policy.
pub fn select_action_greedy(efes: &[EfeBreakdown]) -> Result<usize, PlanningError> {
    let mut best = efes.first().ok_or(PlanningError::EmptyInput)?;
    for e in &efes[1..] {
        if e.g < best.g {
            best = e;
        }
    }
    Ok(best.policy.first_action())
}
