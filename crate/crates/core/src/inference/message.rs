use serde::{Deserialize, Serialize};

use super::{CategoricalBelief, FactorId, InferenceError, LOG_FLOOR};

/// Unnormalized log-space evidence over one factor.
///
/// Only differences between entries carry information: adding a constant to
/// every entry leaves the induced distribution unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogMessage {
    factor: FactorId,
    logits: Vec<f64>,
}

impl LogMessage {
    pub fn new(factor: FactorId, logits: Vec<f64>) -> Self {
        Self { factor, logits }
    }

    /// The all-zero message, carrying no information.
    pub fn zeros(factor: FactorId, n: usize) -> Self {
        Self {
            factor,
            logits: vec![0.0; n],
        }
    }

    /// Log of a belief, with exact zeros floored.
    pub fn from_belief(belief: &CategoricalBelief) -> Self {
        Self {
            factor: belief.factor(),
            logits: belief
                .ln_probs()
                .into_iter()
                .map(|l| if l == f64::NEG_INFINITY { LOG_FLOOR } else { l })
                .collect(),
        }
    }

    pub fn factor(&self) -> FactorId {
        self.factor
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn len(&self) -> usize {
        self.logits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logits.is_empty()
    }

    /// Shifts the message so that its largest entry is zero.
    pub fn max_normalized(&self) -> Self {
        let max = self
            .logits
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let shift = if max.is_finite() { max } else { 0.0 };
        Self {
            factor: self.factor,
            logits: self.logits.iter().map(|l| l - shift).collect(),
        }
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self {
            factor: self.factor,
            logits: self.logits.iter().map(|l| l + c).collect(),
        }
    }

    /// Elementwise sum of messages over the same factor.
    pub fn sum<'a, I>(factor: FactorId, n: usize, messages: I) -> Result<Self, InferenceError>
    where
        I: IntoIterator<Item = &'a LogMessage>,
    {
        let mut logits = vec![0.0; n];
        for m in messages {
            if m.factor != factor {
                return Err(InferenceError::FactorMismatch {
                    expected: factor,
                    found: m.factor,
                });
            }
            if m.len() != n {
                return Err(InferenceError::ShapeError(format!(
                    "message of length {} added to length {n}",
                    m.len()
                )));
            }
            logits.iter_mut().zip(&m.logits).for_each(|(a, b)| *a += b);
        }
        Ok(Self { factor, logits })
    }

    pub fn to_belief(&self) -> Result<CategoricalBelief, InferenceError> {
        CategoricalBelief::from_logits(self.factor, &self.logits)
    }

    /// Largest absolute difference after max-normalizing both messages.
    pub fn max_deviation(&self, other: &LogMessage) -> f64 {
        let a = self.max_normalized();
        let b = other.max_normalized();
        a.logits
            .iter()
            .zip(&b.logits)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}
