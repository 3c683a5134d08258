//! Categorical inference for a single agent.
//!
//! Beliefs live in probability space ([`CategoricalBelief`]) and evidence lives
//! in log space ([`LogMessage`]). A posterior is always the softmax of a sum of
//! messages: one prior message through the dynamics plus one message per
//! active observation modality.

mod belief;
mod free_energy;
mod message;
mod oracle;
mod tensor;
mod vmp;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use belief::CategoricalBelief;
pub use free_energy::{kl_divergence, variational_free_energy};
pub use message::LogMessage;
pub use oracle::exact_bayes_oracle;
pub use tensor::{LikelihoodTensor, ObservationEvent, ObservationValue, TransitionTensor};
pub use vmp::{likelihood_message, transition_prediction, vmp_update};

/// Tolerance used when checking that a distribution or a tensor slice is stochastic.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Log value substituted for an exact zero probability.
pub const LOG_FLOOR: f64 = -36.841_361_487_904_734; // ln(1e-16)

/// Latent state factors of the agent's generative model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorId {
    /// The agent's own location.
    Location,
    /// The location of the searched-for object.
    Object,
}

/// Observation modalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModalityId {
    Location,
    Visibility,
    /// Channel carrying another agent's message about the object factor.
    Shared,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),
    #[error("empty input")]
    EmptyInput,
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("missing belief for parent factor {0:?}")]
    IncompleteParents(FactorId),
    #[error("action {action} out of range for {count} actions")]
    InvalidAction { action: usize, count: usize },
    #[error("factor mismatch: expected {expected:?}, found {found:?}")]
    FactorMismatch { expected: FactorId, found: FactorId },
    #[error("not stochastic: {0}")]
    NotStochastic(String),
}

/// Natural log with exact zeros mapped to [`LOG_FLOOR`].
///
/// Only zeros are floored. Small positive values keep their exact log so that
/// repeated evidence keeps accumulating instead of saturating at the floor.
#[inline]
pub fn floored_ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        LOG_FLOOR
    }
}

/// Rescales a non-negative vector to sum to one.
pub fn normalize(values: &[f64]) -> Result<Vec<f64>, InferenceError> {
    if values.is_empty() {
        return Err(InferenceError::EmptyInput);
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(InferenceError::DegenerateDistribution(format!(
            "entry {bad} is negative or not finite"
        )));
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(InferenceError::DegenerateDistribution(
            "all entries are zero".into(),
        ));
    }
    Ok(values.iter().map(|v| v / total).collect())
}

/// Numerically stable softmax. `-inf` entries are treated as [`LOG_FLOOR`].
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>, InferenceError> {
    if logits.is_empty() {
        return Err(InferenceError::EmptyInput);
    }
    if logits.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(InferenceError::DegenerateDistribution(
            "softmax input contains NaN or +inf".into(),
        ));
    }
    let sentinel = |l: f64| if l == f64::NEG_INFINITY { LOG_FLOOR } else { l };
    let max = logits
        .iter()
        .map(|l| sentinel(*l))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|l| (sentinel(*l) - max).exp()).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    Ok(out)
}

/// Shannon entropy in nats.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[2.0, 2.0, 0.0]).unwrap(), vec![0.5, 0.5, 0.0]);
        assert_eq!(normalize(&[1.0]).unwrap(), vec![1.0]);
        let third = 1.0 / 3.0;
        let out = normalize(&[0.2 * third, 0.8 * third, 0.8 * third]).unwrap();
        assert!(close(&out, &[1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0], 1e-15));
    }

    #[test]
    fn normalize_rejects_degenerate() {
        assert!(matches!(
            normalize(&[0.0, 0.0]),
            Err(InferenceError::DegenerateDistribution(_))
        ));
        assert!(matches!(
            normalize(&[0.5, -0.1]),
            Err(InferenceError::DegenerateDistribution(_))
        ));
    }

    #[test]
    fn softmax_examples() {
        assert_eq!(softmax(&[0.0, 0.0]).unwrap(), vec![0.5, 0.5]);
        for c in [-50.0, 0.0, 3.7, 900.0] {
            assert!(close(&softmax(&[c, c, c]).unwrap(), &[1.0 / 3.0; 3], 1e-15));
        }
        let out = softmax(&[0.0, -(4.0f64).ln()]).unwrap();
        assert!(close(&out, &[0.8, 0.2], 1e-15));
        assert_eq!(softmax(&[]), Err(InferenceError::EmptyInput));
    }

    #[test]
    fn floor_only_applies_to_zero() {
        assert_eq!(floored_ln(0.0), LOG_FLOOR);
        assert!((LOG_FLOOR - (1e-16f64).ln()).abs() < 1e-12);
        assert!((floored_ln(1e-20) - (1e-20f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_uniform() {
        assert!((entropy(&[0.25; 4]) - (4.0f64).ln()).abs() < 1e-15);
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
    }
}
