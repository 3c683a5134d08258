use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use super::{entropy, floored_ln, FactorId, InferenceError, ModalityId, STOCHASTIC_TOL};

/// Conditional probability table `P(o | parents)`.
///
/// Storage is outcome-major: entry `(o, p)` lives at `o * parent_configs + p`,
/// where `p` is the row-major flat index over the parent factors in declaration order.
#[derive(Debug, Clone)]
pub struct LikelihoodTensor {
    modality: ModalityId,
    outcomes: usize,
    parents: Vec<(FactorId, usize)>,
    table: Vec<f64>,
    counts: Option<Vec<f64>>,
    log_weights: Vec<f64>,
    column_entropy: Vec<f64>,
}

impl LikelihoodTensor {
    /// Builds a tensor with point-estimate weighting (log of the table).
    pub fn new(
        modality: ModalityId,
        outcomes: usize,
        parents: Vec<(FactorId, usize)>,
        table: Vec<f64>,
    ) -> Result<Self, InferenceError> {
        let configs = Self::check_shape(outcomes, &parents, table.len())?;
        if table.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(InferenceError::NotStochastic(format!(
                "{modality:?} table has entries outside [0, 1]"
            )));
        }
        for p in 0..configs {
            let total: f64 = (0..outcomes).map(|o| table[o * configs + p]).sum();
            if (total - 1.0).abs() > STOCHASTIC_TOL {
                return Err(InferenceError::NotStochastic(format!(
                    "{modality:?} slice {p} sums to {total}"
                )));
            }
        }
        let log_weights = table.iter().map(|p| floored_ln(*p)).collect();
        let column_entropy = (0..configs)
            .map(|p| {
                let column: Vec<f64> = (0..outcomes).map(|o| table[o * configs + p]).collect();
                entropy(&column)
            })
            .collect();
        Ok(Self {
            modality,
            outcomes,
            parents,
            table,
            counts: None,
            log_weights,
            column_entropy,
        })
    }

    /// Builds a tensor from Dirichlet counts.
    ///
    /// The table is the normalized counts; messages use the digamma weighting
    /// `psi(a[o, p]) - psi(sum_o a[o, p])`.
    pub fn from_counts(
        modality: ModalityId,
        outcomes: usize,
        parents: Vec<(FactorId, usize)>,
        counts: Vec<f64>,
    ) -> Result<Self, InferenceError> {
        let configs = Self::check_shape(outcomes, &parents, counts.len())?;
        if counts.iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(InferenceError::DegenerateDistribution(
                "Dirichlet counts must be positive and finite".into(),
            ));
        }
        let mut table = vec![0.0; counts.len()];
        let mut log_weights = vec![0.0; counts.len()];
        for p in 0..configs {
            let total: f64 = (0..outcomes).map(|o| counts[o * configs + p]).sum();
            let psi_total = digamma(total);
            for o in 0..outcomes {
                let k = o * configs + p;
                table[k] = counts[k] / total;
                log_weights[k] = digamma(counts[k]) - psi_total;
            }
        }
        let mut tensor = Self::new(modality, outcomes, parents, table)?;
        tensor.counts = Some(counts);
        tensor.log_weights = log_weights;
        Ok(tensor)
    }

    fn check_shape(
        outcomes: usize,
        parents: &[(FactorId, usize)],
        len: usize,
    ) -> Result<usize, InferenceError> {
        if outcomes == 0 || parents.is_empty() || parents.iter().any(|(_, d)| *d == 0) {
            return Err(InferenceError::ShapeError(
                "likelihood needs at least one outcome and one non-empty parent".into(),
            ));
        }
        let configs: usize = parents.iter().map(|(_, d)| d).product();
        if configs * outcomes != len {
            return Err(InferenceError::ShapeError(format!(
                "table of length {len} does not match {outcomes} outcomes x {configs} parent configurations"
            )));
        }
        Ok(configs)
    }

    pub fn modality(&self) -> ModalityId {
        self.modality
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn parents(&self) -> &[(FactorId, usize)] {
        &self.parents
    }

    pub fn parent_configs(&self) -> usize {
        self.table.len() / self.outcomes
    }

    pub fn counts(&self) -> Option<&[f64]> {
        self.counts.as_deref()
    }

    /// `P(o | parent configuration p)`.
    #[inline]
    pub fn prob(&self, outcome: usize, config: usize) -> f64 {
        self.table[outcome * self.parent_configs() + config]
    }

    /// The weight used in log-space messages for entry `(o, p)`.
    #[inline]
    pub fn log_weight(&self, outcome: usize, config: usize) -> f64 {
        self.log_weights[outcome * self.parent_configs() + config]
    }

    /// Entropy of the outcome distribution for parent configuration `p`.
    #[inline]
    pub fn column_entropy(&self, config: usize) -> f64 {
        self.column_entropy[config]
    }

    /// The outcome distribution for one parent configuration.
    pub fn column(&self, config: usize) -> Vec<f64> {
        (0..self.outcomes).map(|o| self.prob(o, config)).collect()
    }

    /// Row-major flat index of a parent configuration.
    pub fn config_index(&self, parent_indices: &[usize]) -> usize {
        debug_assert_eq!(parent_indices.len(), self.parents.len());
        parent_indices
            .iter()
            .zip(&self.parents)
            .fold(0, |acc, (i, (_, d))| acc * d + i)
    }

    /// Position of `factor` among the parents.
    pub fn parent_position(&self, factor: FactorId) -> Option<usize> {
        self.parents.iter().position(|(f, _)| *f == factor)
    }
}

/// Action-conditioned transition table `P(next | prev, action)`.
#[derive(Debug, Clone)]
pub struct TransitionTensor {
    factor: FactorId,
    states: usize,
    actions: usize,
    table: Vec<f64>,
    // Nonzero (next, p) entries per (prev, action), for fast propagation.
    sparse: Vec<Vec<(usize, f64)>>,
}

impl TransitionTensor {
    /// `table` is indexed `[next][prev][action]`, row-major.
    pub fn new(
        factor: FactorId,
        states: usize,
        actions: usize,
        table: Vec<f64>,
    ) -> Result<Self, InferenceError> {
        if states == 0 || actions == 0 || table.len() != states * states * actions {
            return Err(InferenceError::ShapeError(format!(
                "transition table of length {} for {states} states and {actions} actions",
                table.len()
            )));
        }
        let mut sparse = Vec::with_capacity(states * actions);
        for prev in 0..states {
            for action in 0..actions {
                let mut total = 0.0;
                let mut column = Vec::new();
                for next in 0..states {
                    let p = table[(next * states + prev) * actions + action];
                    if !(0.0..=1.0).contains(&p) {
                        return Err(InferenceError::NotStochastic(format!(
                            "transition entry {p} outside [0, 1]"
                        )));
                    }
                    total += p;
                    if p > 0.0 {
                        column.push((next, p));
                    }
                }
                if (total - 1.0).abs() > STOCHASTIC_TOL {
                    return Err(InferenceError::NotStochastic(format!(
                        "transition column (prev {prev}, action {action}) sums to {total}"
                    )));
                }
                sparse.push(column);
            }
        }
        Ok(Self {
            factor,
            states,
            actions,
            table,
            sparse,
        })
    }

    /// Static dynamics with a single no-op action.
    pub fn identity(factor: FactorId, states: usize) -> Self {
        let mut table = vec![0.0; states * states];
        for i in 0..states {
            table[i * states + i] = 1.0;
        }
        Self::new(factor, states, 1, table).expect("identity is stochastic")
    }

    pub fn factor(&self) -> FactorId {
        self.factor
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn prob(&self, next: usize, prev: usize, action: usize) -> f64 {
        self.table[(next * self.states + prev) * self.actions + action]
    }

    /// `B[:, :, action] . prev`.
    pub fn propagate(&self, prev: &[f64], action: usize) -> Result<Vec<f64>, InferenceError> {
        if action >= self.actions {
            return Err(InferenceError::InvalidAction {
                action,
                count: self.actions,
            });
        }
        if prev.len() != self.states {
            return Err(InferenceError::ShapeError(format!(
                "belief of length {} propagated through {} states",
                prev.len(),
                self.states
            )));
        }
        let mut out = vec![0.0; self.states];
        for (j, q) in prev.iter().enumerate() {
            if *q == 0.0 {
                continue;
            }
            for (i, p) in &self.sparse[j * self.actions + action] {
                out[*i] += p * q;
            }
        }
        Ok(out)
    }
}

impl TransitionTensor {
    /// Log-space propagation: entry `i` is `ln sum_j B[i, j, action] exp(ln_prev[j])`.
    ///
    /// `-inf` inputs contribute nothing; states that receive no mass get `-inf`.
    pub fn propagate_log(
        &self,
        ln_prev: &[f64],
        action: usize,
    ) -> Result<Vec<f64>, InferenceError> {
        if action >= self.actions {
            return Err(InferenceError::InvalidAction {
                action,
                count: self.actions,
            });
        }
        if ln_prev.len() != self.states {
            return Err(InferenceError::ShapeError(format!(
                "belief of length {} propagated through {} states",
                ln_prev.len(),
                self.states
            )));
        }
        let mut peak = vec![f64::NEG_INFINITY; self.states];
        for (j, lq) in ln_prev.iter().enumerate() {
            if *lq == f64::NEG_INFINITY {
                continue;
            }
            for (i, p) in &self.sparse[j * self.actions + action] {
                peak[*i] = peak[*i].max(p.ln() + lq);
            }
        }
        let mut acc = vec![0.0; self.states];
        for (j, lq) in ln_prev.iter().enumerate() {
            if *lq == f64::NEG_INFINITY {
                continue;
            }
            for (i, p) in &self.sparse[j * self.actions + action] {
                acc[*i] += (p.ln() + lq - peak[*i]).exp();
            }
        }
        Ok(peak
            .into_iter()
            .zip(acc)
            .map(|(m, a)| {
                if m == f64::NEG_INFINITY {
                    m
                } else {
                    m + a.ln()
                }
            })
            .collect())
    }
}

/// Either a hard outcome index or a soft outcome distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationValue {
    Hard(usize),
    Soft(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationEvent {
    pub modality: ModalityId,
    pub value: ObservationValue,
}

impl ObservationEvent {
    pub fn hard(modality: ModalityId, index: usize) -> Self {
        Self {
            modality,
            value: ObservationValue::Hard(index),
        }
    }

    pub fn soft(modality: ModalityId, probs: Vec<f64>) -> Self {
        Self {
            modality,
            value: ObservationValue::Soft(probs),
        }
    }

    /// Per-outcome weights, validated against the outcome cardinality.
    pub fn weights(&self, outcomes: usize) -> Result<Vec<f64>, InferenceError> {
        match &self.value {
            ObservationValue::Hard(i) if *i < outcomes => {
                let mut w = vec![0.0; outcomes];
                w[*i] = 1.0;
                Ok(w)
            }
            ObservationValue::Hard(i) => Err(InferenceError::ShapeError(format!(
                "outcome {i} out of range for {outcomes} outcomes"
            ))),
            ObservationValue::Soft(p) if p.len() != outcomes => {
                Err(InferenceError::ShapeError(format!(
                    "soft observation of length {} for {outcomes} outcomes",
                    p.len()
                )))
            }
            ObservationValue::Soft(p) => {
                let total: f64 = p.iter().sum();
                if p.iter().any(|x| x.is_nan() || *x < 0.0) || (total - 1.0).abs() > STOCHASTIC_TOL
                {
                    return Err(InferenceError::NotStochastic(format!(
                        "soft observation sums to {total}"
                    )));
                }
                Ok(p.clone())
            }
        }
    }
}
