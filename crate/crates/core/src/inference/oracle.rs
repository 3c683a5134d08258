use super::{normalize, CategoricalBelief, InferenceError};

/// Posterior by direct multiplication: `normalize(prior * prod(columns))`.
///
/// Works in probability space and never touches log messages, so it can be
/// used to check the message-passing route.
pub fn exact_bayes_oracle(
    prior: &CategoricalBelief,
    likelihood_columns: &[Vec<f64>],
) -> Result<CategoricalBelief, InferenceError> {
    let mut product = prior.probs().to_vec();
    for column in likelihood_columns {
        if column.len() != product.len() {
            return Err(InferenceError::ShapeError(format!(
                "likelihood column of length {} for {} states",
                column.len(),
                product.len()
            )));
        }
        product.iter_mut().zip(column).for_each(|(p, l)| *p *= l);
    }
    CategoricalBelief::new(prior.factor(), normalize(&product)?)
}
