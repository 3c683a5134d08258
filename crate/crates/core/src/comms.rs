//! Inter-agent messages about the object factor.
//!
//! Under posterior sharing a sender transmits the log of its whole object
//! belief, which already contains its prior. Under likelihood sharing it
//! transmits only the messages its own observations sent into the object
//! factor. A receiver adds every payload to its object update as one extra
//! likelihood message per sender.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::inference::{vmp_update, CategoricalBelief, FactorId, InferenceError, LogMessage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommMode {
    None,
    PosteriorSharing,
    LikelihoodSharing,
}

impl CommMode {
    pub const ALL: [CommMode; 3] = [
        CommMode::None,
        CommMode::PosteriorSharing,
        CommMode::LikelihoodSharing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CommMode::None => "none",
            CommMode::PosteriorSharing => "posterior_sharing",
            CommMode::LikelihoodSharing => "likelihood_sharing",
        }
    }
}

impl fmt::Display for CommMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CommMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "none" => Ok(CommMode::None),
            "posterior_sharing" | "posterior" => Ok(CommMode::PosteriorSharing),
            "likelihood_sharing" | "likelihood" => Ok(CommMode::LikelihoodSharing),
            other => Err(format!(
                "unknown communication mode `{other}` (expected none, posterior_sharing or likelihood_sharing)"
            )),
        }
    }
}

/// One message from `sender`, max-normalized so its largest entry is 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedMessage {
    pub sender: usize,
    pub factor: FactorId,
    pub payload: LogMessage,
    pub mode: CommMode,
}

pub fn compose_posterior_message(sender: usize, posterior: &CategoricalBelief) -> SharedMessage {
    debug_assert_eq!(posterior.factor(), FactorId::Object);
    SharedMessage {
        sender,
        factor: posterior.factor(),
        payload: LogMessage::from_belief(posterior).max_normalized(),
        mode: CommMode::PosteriorSharing,
    }
}

/// Sums the sender's observation-derived object messages. No messages gives the zero payload.
pub fn compose_likelihood_message(
    sender: usize,
    num_locations: usize,
    likelihood_msgs: &[LogMessage],
) -> Result<SharedMessage, InferenceError> {
    let payload = LogMessage::sum(FactorId::Object, num_locations, likelihood_msgs)?;
    Ok(SharedMessage {
        sender,
        factor: FactorId::Object,
        payload: payload.max_normalized(),
        mode: CommMode::LikelihoodSharing,
    })
}

/// What a sender exposes to a round: its pre-round object belief and own object likelihoods.
#[derive(Debug, Clone, Copy)]
pub struct AgentSnapshot<'a> {
    pub object_belief: &'a CategoricalBelief,
    pub object_likelihood: &'a [LogMessage],
}

/// Synchronous all-to-all round. Entry `r` holds the messages for receiver `r`, ordered by sender.
pub fn broadcast_round(
    snapshots: &[AgentSnapshot<'_>],
    mode: CommMode,
) -> Result<Vec<Vec<SharedMessage>>, InferenceError> {
    let outgoing: Vec<Option<SharedMessage>> = snapshots
        .iter()
        .enumerate()
        .map(|(sender, snap)| match mode {
            CommMode::None => Ok(None),
            CommMode::PosteriorSharing => {
                Ok(Some(compose_posterior_message(sender, snap.object_belief)))
            }
            CommMode::LikelihoodSharing => {
                compose_likelihood_message(sender, snap.object_belief.len(), snap.object_likelihood)
                    .map(Some)
            }
        })
        .collect::<Result<_, _>>()?;
    Ok((0..snapshots.len())
        .map(|receiver| {
            outgoing
                .iter()
                .flatten()
                .filter(|m| m.sender != receiver)
                .cloned()
                .collect()
        })
        .collect())
}

/// Object-factor update with shared payloads appended to the receiver's own messages.
pub fn integrate_shared(
    prior: &LogMessage,
    own_likelihood: &[LogMessage],
    shared: &[SharedMessage],
) -> Result<CategoricalBelief, InferenceError> {
    let mut msgs = own_likelihood.to_vec();
    msgs.extend(shared.iter().map(|m| m.payload.clone()));
    vmp_update(prior, &msgs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::exact_bayes_oracle;

    fn belief(p: &[f64]) -> CategoricalBelief {
        CategoricalBelief::new(FactorId::Object, p.to_vec()).unwrap()
    }

    fn assert_proportional(m: &LogMessage, expected: &[f64]) {
        let dev = m.max_deviation(&LogMessage::new(FactorId::Object, expected.to_vec()));
        assert!(dev < 1e-12, "{:?} vs {expected:?}", m.logits());
    }

    #[test]
    fn posterior_payload_is_log_belief() {
        let m = compose_posterior_message(3, &belief(&[0.7, 0.3]));
        assert_proportional(&m.payload, &[0.7f64.ln(), 0.3f64.ln()]);
        assert_eq!(m.mode, CommMode::PosteriorSharing);
        let flat = compose_posterior_message(0, &belief(&[0.25; 4]));
        assert!(flat.payload.logits().iter().all(|l| *l == 0.0));
    }

    #[test]
    fn identical_priors_are_double_counted() {
        let prior = belief(&[0.6, 0.4]);
        let prior_msg = LogMessage::from_belief(&prior);
        let shared = [compose_posterior_message(1, &prior)];
        let q = integrate_shared(&prior_msg, &[], &shared).unwrap();
        let expected = [0.36 / 0.52, 0.16 / 0.52];
        for (a, b) in q.probs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((q.probs()[0] - 0.692).abs() < 1e-3);
    }

    #[test]
    fn likelihood_payload_without_observations_changes_nothing() {
        let prior = belief(&[0.6, 0.4]);
        let prior_msg = LogMessage::from_belief(&prior);
        let shared = [compose_likelihood_message(1, 2, &[]).unwrap()];
        assert!(shared[0].payload.logits().iter().all(|l| *l == 0.0));
        let q = integrate_shared(&prior_msg, &[], &shared).unwrap();
        for (a, b) in q.probs().iter().zip(prior.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn likelihood_payload_sums_messages() {
        let miss = LogMessage::new(
            FactorId::Object,
            vec![0.2f64.ln(), 0.8f64.ln(), 0.8f64.ln()],
        );
        let m = compose_likelihood_message(0, 3, std::slice::from_ref(&miss)).unwrap();
        assert_proportional(&m.payload, miss.logits());
        let twice = compose_likelihood_message(0, 3, &[miss.clone(), miss]).unwrap();
        assert_proportional(&twice.payload, &[0.04f64.ln(), 0.64f64.ln(), 0.64f64.ln()]);
    }

    #[test]
    fn posterior_payload_matches_product_oracle() {
        let prior = belief(&[0.5, 0.3, 0.2]);
        let own: Vec<f64> = vec![0.8, 0.2, 0.2];
        let sender = belief(&[0.1, 0.6, 0.3]);
        let own_msg = LogMessage::new(FactorId::Object, own.iter().map(|x| x.ln()).collect());
        let q = integrate_shared(
            &LogMessage::from_belief(&prior),
            &[own_msg],
            &[compose_posterior_message(1, &sender)],
        )
        .unwrap();
        let oracle = exact_bayes_oracle(&prior, &[own, sender.probs().to_vec()]).unwrap();
        for (a, b) in q.probs().iter().zip(oracle.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn k_co_located_misses_scale_odds() {
        let n = 4;
        let prior = CategoricalBelief::uniform(FactorId::Object, n);
        let miss_at_1: Vec<f64> = (0..n).map(|i| if i == 1 { 0.2 } else { 0.8 }).collect();
        let miss_msg =
            LogMessage::new(FactorId::Object, miss_at_1.iter().map(|x| x.ln()).collect());
        for k in 0..5 {
            let shared: Vec<_> = (0..k)
                .map(|s| {
                    compose_likelihood_message(s + 1, n, std::slice::from_ref(&miss_msg)).unwrap()
                })
                .collect();
            let q = integrate_shared(&LogMessage::from_belief(&prior), &[], &shared).unwrap();
            let odds = q.probs()[1] / q.probs()[0];
            assert!((odds - 0.25f64.powi(k as i32)).abs() < 1e-12);
            let oracle = exact_bayes_oracle(&prior, &vec![miss_at_1.clone(); k]).unwrap();
            for (a, b) in q.probs().iter().zip(oracle.probs()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn broadcast_counts_and_order() {
        let beliefs: Vec<_> = (0..4)
            .map(|_| CategoricalBelief::uniform(FactorId::Object, 3))
            .collect();
        let snaps: Vec<_> = beliefs
            .iter()
            .map(|b| AgentSnapshot {
                object_belief: b,
                object_likelihood: &[],
            })
            .collect();
        for mode in [CommMode::PosteriorSharing, CommMode::LikelihoodSharing] {
            let out = broadcast_round(&snaps, mode).unwrap();
            for (r, inbox) in out.iter().enumerate() {
                assert_eq!(inbox.len(), 3);
                assert!(inbox.iter().all(|m| m.sender != r && m.mode == mode));
                assert!(inbox.windows(2).all(|w| w[0].sender < w[1].sender));
            }
            assert_eq!(broadcast_round(&snaps[..2], mode).unwrap()[0].len(), 1);
        }
        let out = broadcast_round(&snaps, CommMode::None).unwrap();
        assert!(out.iter().all(Vec::is_empty));
    }

    #[test]
    fn mode_parsing() {
        for m in CommMode::ALL {
            assert_eq!(m.as_str().parse::<CommMode>().unwrap(), m);
        }
        assert_eq!(
            "likelihood-sharing".parse::<CommMode>().unwrap(),
            CommMode::LikelihoodSharing
        );
        assert!("gossip".parse::<CommMode>().is_err());
    }
}
