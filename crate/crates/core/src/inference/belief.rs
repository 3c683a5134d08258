use serde::{Deserialize, Serialize};

use super::{normalize, softmax, FactorId, InferenceError, STOCHASTIC_TOL};

/// A normalized probability vector over one latent factor.
///
/// Beliefs produced from log space also keep their exact log-probabilities, so
/// that states whose probability underflows to zero still carry evidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoricalBelief {
    factor: FactorId,
    probs: Vec<f64>,
    #[serde(skip)]
    log_probs: Option<Vec<f64>>,
}

impl PartialEq for CategoricalBelief {
    fn eq(&self, other: &Self) -> bool {
        self.factor == other.factor && self.probs == other.probs
    }
}

impl CategoricalBelief {
    /// Wraps an already-normalized vector, rejecting anything that is not a distribution.
    pub fn new(factor: FactorId, probs: Vec<f64>) -> Result<Self, InferenceError> {
        if probs.is_empty() {
            return Err(InferenceError::EmptyInput);
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(InferenceError::DegenerateDistribution(
                "belief entries must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(InferenceError::NotStochastic(format!(
                "belief sums to {total}"
            )));
        }
        Ok(Self {
            factor,
            probs,
            log_probs: None,
        })
    }

    /// Normalizes `weights` and wraps the result.
    pub fn from_weights(factor: FactorId, weights: &[f64]) -> Result<Self, InferenceError> {
        Ok(Self {
            factor,
            probs: normalize(weights)?,
            log_probs: None,
        })
    }

    pub fn from_logits(factor: FactorId, logits: &[f64]) -> Result<Self, InferenceError> {
        let probs = softmax(logits)?;
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
        Ok(Self {
            factor,
            probs,
            log_probs: Some(logits.iter().map(|l| l - lse).collect()),
        })
    }

    pub fn uniform(factor: FactorId, n: usize) -> Self {
        assert!(n > 0, "uniform belief needs at least one state");
        Self {
            factor,
            probs: vec![1.0 / n as f64; n],
            log_probs: None,
        }
    }

    pub fn one_hot(factor: FactorId, n: usize, index: usize) -> Self {
        assert!(index < n, "one-hot index {index} out of range {n}");
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Self {
            factor,
            probs,
            log_probs: None,
        }
    }

    pub fn factor(&self) -> FactorId {
        self.factor
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Natural log of each probability. Exact zeros map to `-inf`.
    pub fn ln_probs(&self) -> Vec<f64> {
        match &self.log_probs {
            Some(logs) => logs.clone(),
            None => self.probs.iter().map(|p| p.ln()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Index of the most probable state; ties resolve to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.probs.iter().enumerate() {
            if *p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// Total probability of the given states.
    pub fn mass_on(&self, states: &[usize]) -> f64 {
        states.iter().map(|i| self.probs[*i]).sum()
    }

    /// Total probability of every state not listed.
    ///
    /// Prefer this over `1 - mass_on(..)` when the listed states hold almost all of the mass.
    pub fn mass_off(&self, states: &[usize]) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(i, _)| !states.contains(i))
            .map(|(_, p)| p)
            .sum()
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }
}
