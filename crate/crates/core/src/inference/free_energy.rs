use super::{CategoricalBelief, InferenceError, LogMessage};

/// `KL(q || p)` in nats. Infinite when `q` puts mass where `p` has none.
pub fn kl_divergence(q: &[f64], p: &[f64]) -> f64 {
    q.iter()
        .zip(p)
        .filter(|(qi, _)| **qi > 0.0)
        .map(|(qi, pi)| {
            if *pi > 0.0 {
                qi * (qi.ln() - pi.ln())
            } else {
                f64::INFINITY
            }
        })
        .sum()
}

/// Complexity minus accuracy: `KL(q || prior) - E_q[sum of likelihood logits]`.
///
/// With likelihood messages holding true log-likelihoods, the minimum over `q`
/// is reached at the exact posterior, where it equals the negative log evidence.
pub fn variational_free_energy(
    q: &CategoricalBelief,
    prior: &CategoricalBelief,
    likelihood_msgs: &[LogMessage],
) -> Result<f64, InferenceError> {
    if q.len() != prior.len() {
        return Err(InferenceError::ShapeError(format!(
            "posterior of length {} against prior of length {}",
            q.len(),
            prior.len()
        )));
    }
    if q.factor() != prior.factor() {
        return Err(InferenceError::FactorMismatch {
            expected: prior.factor(),
            found: q.factor(),
        });
    }
    let evidence = LogMessage::sum(prior.factor(), prior.len(), likelihood_msgs)?;
    let complexity = kl_divergence(q.probs(), prior.probs());
    let accuracy: f64 = q
        .probs()
        .iter()
        .zip(evidence.logits())
        .filter(|(qi, _)| **qi > 0.0)
        .map(|(qi, l)| qi * l)
        .sum();
    Ok(complexity - accuracy)
}
