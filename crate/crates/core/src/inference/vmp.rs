use super::{
    CategoricalBelief, FactorId, InferenceError, LikelihoodTensor, LogMessage, ObservationEvent,
    TransitionTensor, LOG_FLOOR,
};

/// Message from an observed modality to one of its parent factors.
///
/// The observation is contracted with the log weights of `a` and with the
/// beliefs of every other parent factor, leaving a log message over `target`.
pub fn likelihood_message(
    a: &LikelihoodTensor,
    obs: &ObservationEvent,
    co_parent_beliefs: &[&CategoricalBelief],
    target: FactorId,
) -> Result<LogMessage, InferenceError> {
    if obs.modality != a.modality() {
        return Err(InferenceError::ShapeError(format!(
            "{:?} observation passed to {:?} likelihood",
            obs.modality,
            a.modality()
        )));
    }
    let weights = obs.weights(a.outcomes())?;
    let target_pos = a.parent_position(target).ok_or_else(|| {
        InferenceError::ShapeError(format!("{target:?} is not a parent of {:?}", a.modality()))
    })?;

    let parents = a.parents();
    let mut beliefs: Vec<Option<&[f64]>> = vec![None; parents.len()];
    for belief in co_parent_beliefs {
        let pos = a
            .parent_position(belief.factor())
            .filter(|p| *p != target_pos)
            .ok_or_else(|| {
                InferenceError::ShapeError(format!(
                    "{:?} belief is not a co-parent for target {target:?}",
                    belief.factor()
                ))
            })?;
        if belief.len() != parents[pos].1 {
            return Err(InferenceError::ShapeError(format!(
                "{:?} belief has length {}, expected {}",
                belief.factor(),
                belief.len(),
                parents[pos].1
            )));
        }
        beliefs[pos] = Some(belief.probs());
    }
    for (pos, (factor, _)) in parents.iter().enumerate() {
        if pos != target_pos && beliefs[pos].is_none() {
            return Err(InferenceError::IncompleteParents(*factor));
        }
    }

    let target_dim = parents[target_pos].1;
    let mut logits = vec![0.0; target_dim];
    let mut index = vec![0usize; parents.len()];
    for config in 0..a.parent_configs() {
        let mut weight = 1.0;
        for (pos, i) in index.iter().enumerate() {
            if let Some(q) = beliefs[pos] {
                weight *= q[*i];
            }
        }
        if weight != 0.0 {
            let evidence: f64 = weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != 0.0)
                .map(|(o, w)| w * a.log_weight(o, config))
                .sum();
            logits[index[target_pos]] += weight * evidence;
        }
        // Advance the row-major odometer over parent indices.
        for pos in (0..parents.len()).rev() {
            index[pos] += 1;
            if index[pos] < parents[pos].1 {
                break;
            }
            index[pos] = 0;
        }
    }
    Ok(LogMessage::new(target, logits))
}

/// Prior message for the current step: the previous belief pushed through the dynamics.
pub fn transition_prediction(
    b: &TransitionTensor,
    prev: &CategoricalBelief,
    action: usize,
) -> Result<LogMessage, InferenceError> {
    if prev.factor() != b.factor() {
        return Err(InferenceError::FactorMismatch {
            expected: b.factor(),
            found: prev.factor(),
        });
    }
    let predicted = b.propagate_log(&prev.ln_probs(), action)?;
    Ok(LogMessage::new(
        b.factor(),
        predicted
            .into_iter()
            .map(|l| if l == f64::NEG_INFINITY { LOG_FLOOR } else { l })
            .collect(),
    ))
}

/// Posterior as the softmax of the prior message plus all likelihood messages.
pub fn vmp_update(
    prior: &LogMessage,
    likelihood_msgs: &[LogMessage],
) -> Result<CategoricalBelief, InferenceError> {
    let total = LogMessage::sum(
        prior.factor(),
        prior.len(),
        std::iter::once(prior).chain(likelihood_msgs),
    )?;
    total.to_belief()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::ModalityId;

    fn visibility_tensor(n: usize) -> LikelihoodTensor {
        // [visible, not visible] x agent location x object location
        let mut table = vec![0.0; 2 * n * n];
        for i in 0..n {
            for j in 0..n {
                let hit = if i == j { 0.8 } else { 0.2 };
                table[i * n + j] = hit;
                table[n * n + i * n + j] = 1.0 - hit;
            }
        }
        LikelihoodTensor::new(
            ModalityId::Visibility,
            2,
            vec![(FactorId::Location, n), (FactorId::Object, n)],
            table,
        )
        .unwrap()
    }

    fn assert_logits_proportional(m: &LogMessage, expected: &[f64]) {
        let shift = expected[0] - m.logits()[0];
        for (a, b) in m.logits().iter().zip(expected) {
            assert!(
                (a + shift - b).abs() < 1e-12,
                "{:?} vs {expected:?}",
                m.logits()
            );
        }
    }

    #[test]
    fn visibility_message_for_object() {
        let a = visibility_tensor(3);
        let loc = CategoricalBelief::one_hot(FactorId::Location, 3, 0);
        let obs = ObservationEvent::hard(ModalityId::Visibility, 0);
        let m = likelihood_message(&a, &obs, &[&loc], FactorId::Object).unwrap();
        assert_logits_proportional(&m, &[0.8f64.ln(), 0.2f64.ln(), 0.2f64.ln()]);
    }

    #[test]
    fn location_message_from_near_identity() {
        let mut table = vec![0.01 / 2.0; 9];
        for i in 0..3 {
            table[i * 3 + i] = 0.99;
        }
        let a = LikelihoodTensor::new(
            ModalityId::Location,
            3,
            vec![(FactorId::Location, 3)],
            table,
        )
        .unwrap();
        let obs = ObservationEvent::hard(ModalityId::Location, 2);
        let m = likelihood_message(&a, &obs, &[], FactorId::Location).unwrap();
        let off = (0.005f64).ln();
        assert_logits_proportional(&m, &[off, off, 0.99f64.ln()]);
    }

    #[test]
    fn uniform_table_gives_constant_logits() {
        let a = LikelihoodTensor::new(
            ModalityId::Visibility,
            2,
            vec![(FactorId::Location, 3), (FactorId::Object, 3)],
            vec![0.5; 18],
        )
        .unwrap();
        let loc = CategoricalBelief::from_weights(FactorId::Location, &[0.2, 0.5, 0.3]).unwrap();
        for o in 0..2 {
            let obs = ObservationEvent::hard(ModalityId::Visibility, o);
            let m = likelihood_message(&a, &obs, &[&loc], FactorId::Object).unwrap();
            assert!(m.logits().iter().all(|l| (l - m.logits()[0]).abs() < 1e-15));
        }
    }

    #[test]
    fn missing_and_extra_parents() {
        let a = visibility_tensor(2);
        let obs = ObservationEvent::hard(ModalityId::Visibility, 0);
        assert_eq!(
            likelihood_message(&a, &obs, &[], FactorId::Object),
            Err(InferenceError::IncompleteParents(FactorId::Location))
        );
        let obj = CategoricalBelief::uniform(FactorId::Object, 2);
        assert!(matches!(
            likelihood_message(&a, &obs, &[&obj], FactorId::Object),
            Err(InferenceError::ShapeError(_))
        ));
        let short = CategoricalBelief::uniform(FactorId::Location, 3);
        assert!(matches!(
            likelihood_message(&a, &obs, &[&short], FactorId::Object),
            Err(InferenceError::ShapeError(_))
        ));
    }

    #[test]
    fn identity_dynamics_keep_belief() {
        let b = TransitionTensor::identity(FactorId::Object, 2);
        let prev = CategoricalBelief::new(FactorId::Object, vec![0.3, 0.7]).unwrap();
        let m = transition_prediction(&b, &prev, 0).unwrap();
        assert_logits_proportional(&m, &[0.3f64.ln(), 0.7f64.ln()]);
        assert!(matches!(
            transition_prediction(&b, &prev, 3),
            Err(InferenceError::InvalidAction { .. })
        ));
    }

    #[test]
    fn vmp_update_examples() {
        let flat = LogMessage::zeros(FactorId::Object, 2);
        let lik = LogMessage::new(FactorId::Object, vec![0.8f64.ln(), 0.2f64.ln()]);
        let q = vmp_update(&flat, &[lik]).unwrap();
        assert!((q.probs()[0] - 0.8).abs() < 1e-15);

        let prior = LogMessage::new(
            FactorId::Object,
            vec![
                0.95f64.ln(),
                super::super::LOG_FLOOR,
                0.025f64.ln(),
                0.025f64.ln(),
            ],
        );
        let q = vmp_update(&prior, &[]).unwrap();
        let expected = prior.to_belief().unwrap();
        assert_eq!(q, expected);

        let flat3 = LogMessage::zeros(FactorId::Object, 3);
        let miss = LogMessage::new(
            FactorId::Object,
            vec![0.2f64.ln(), 0.8f64.ln(), 0.8f64.ln()],
        );
        let q = vmp_update(&flat3, &[miss]).unwrap();
        for (a, b) in q.probs().iter().zip([1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn vmp_update_rejects_factor_mismatch() {
        let prior = LogMessage::zeros(FactorId::Object, 2);
        let other = LogMessage::zeros(FactorId::Location, 2);
        assert!(matches!(
            vmp_update(&prior, &[other]),
            Err(InferenceError::FactorMismatch { .. })
        ));
    }
}
