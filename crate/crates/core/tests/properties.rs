use beliefshare_core::comms::{broadcast_round, integrate_shared, AgentSnapshot};
use beliefshare_core::inference::{exact_bayes_oracle, likelihood_message, vmp_update};
use beliefshare_core::planning::{enumerate_policies, expected_free_energy, PolicyEvaluator};
use beliefshare_core::world::WorldGraph;
use beliefshare_core::{
    CategoricalBelief, CommMode, FactorId, GenerativeModel, LikelihoodTensor, LogMessage,
    ModalityId, ObservationEvent, PreferenceModel,
};
use proptest::prelude::*;

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    })
}

fn object(p: Vec<f64>) -> CategoricalBelief {
    CategoricalBelief::new(FactorId::Object, p).unwrap()
}

fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>, usize)> {
    (2usize..=6, 2usize..=4)
        .prop_flat_map(|(n, k)| (simplex(n), prop::collection::vec(simplex(k), n), 0..k))
}

proptest! {
    #[test]
    fn vmp_matches_oracle((prior, columns, o) in instance()) {
        let n = prior.len();
        let k = columns[0].len();
        let mut table = vec![0.0; k * n];
        for (s, col) in columns.iter().enumerate() {
            for (out, p) in col.iter().enumerate() {
                table[out * n + s] = *p;
            }
        }
        let a = LikelihoodTensor::new(ModalityId::Shared, k, vec![(FactorId::Object, n)], table).unwrap();
        let prior = object(prior);
        let msg = likelihood_message(&a, &ObservationEvent::hard(ModalityId::Shared, o), &[], FactorId::Object).unwrap();
        let q = vmp_update(&LogMessage::from_belief(&prior), &[msg]).unwrap();
        let column: Vec<f64> = columns.iter().map(|c| c[o]).collect();
        let exact = exact_bayes_oracle(&prior, &[column]).unwrap();
        for (x, y) in q.probs().iter().zip(exact.probs()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn broadcast_is_order_independent(priors in prop::collection::vec(simplex(4), 2..5), shift in 1usize..4) {
        let beliefs: Vec<_> = priors.into_iter().map(object).collect();
        let k = beliefs.len();
        let perm: Vec<usize> = (0..k).map(|i| (i + shift) % k).collect();
        let snaps: Vec<_> = beliefs.iter().map(|b| AgentSnapshot { object_belief: b, object_likelihood: &[] }).collect();
        let permuted: Vec<_> = perm.iter().map(|&i| snaps[i]).collect();
        let out = broadcast_round(&snaps, CommMode::PosteriorSharing).unwrap();
        let out_p = broadcast_round(&permuted, CommMode::PosteriorSharing).unwrap();
        for (new_idx, &old_idx) in perm.iter().enumerate() {
            let mut a: Vec<_> = out[old_idx].iter().map(|m| m.payload.clone()).collect();
            let mut b: Vec<_> = out_p[new_idx].iter().map(|m| m.payload.clone()).collect();
            let key = |m: &LogMessage| m.logits().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            a.sort_by_key(key);
            b.sort_by_key(key);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn likelihood_sharing_without_evidence_is_a_fixed_point(priors in prop::collection::vec(simplex(5), 2..5)) {
        let beliefs: Vec<_> = priors.into_iter().map(object).collect();
        let snaps: Vec<_> = beliefs.iter().map(|b| AgentSnapshot { object_belief: b, object_likelihood: &[] }).collect();
        let inbox = broadcast_round(&snaps, CommMode::LikelihoodSharing).unwrap();
        for (b, msgs) in beliefs.iter().zip(&inbox) {
            let q = integrate_shared(&LogMessage::from_belief(b), &[], msgs).unwrap();
            for (x, y) in q.probs().iter().zip(b.probs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn posterior_sharing_amplifies_identical_priors(prior in simplex(4), k in 2usize..5) {
        let max = prior.iter().copied().fold(0.0, f64::max);
        let uniform_like = prior.iter().all(|p| (p - max).abs() < 1e-9);
        prop_assume!(!uniform_like);
        let beliefs = vec![object(prior); k];
        let snaps: Vec<_> = beliefs.iter().map(|b| AgentSnapshot { object_belief: b, object_likelihood: &[] }).collect();
        let inbox = broadcast_round(&snaps, CommMode::PosteriorSharing).unwrap();
        for (b, msgs) in beliefs.iter().zip(&inbox) {
            let q = integrate_shared(&LogMessage::from_belief(b), &[], msgs).unwrap();
            prop_assert!(q.max_prob() > b.max_prob());
        }
    }

    #[test]
    fn likelihood_sharing_equals_pooled_observer(n in 2usize..6, seen in prop::collection::vec(any::<bool>(), 2), nodes in prop::collection::vec(0usize..6, 2)) {
        let model = GenerativeModel::for_graph(&WorldGraph::complete(n));
        let flat = CategoricalBelief::uniform(FactorId::Object, n);
        let mut own = Vec::new();
        for (vis, node) in seen.iter().zip(&nodes) {
            let loc = CategoricalBelief::one_hot(FactorId::Location, n, node % n);
            let obs = ObservationEvent::hard(ModalityId::Visibility, usize::from(!vis));
            own.push(likelihood_message(&model.a_visibility, &obs, &[&loc], FactorId::Object).unwrap());
        }
        let snaps: Vec<_> = (0..2).map(|i| AgentSnapshot { object_belief: &flat, object_likelihood: std::slice::from_ref(&own[i]) }).collect();
        let inbox = broadcast_round(&snaps, CommMode::LikelihoodSharing).unwrap();
        let shared = integrate_shared(&LogMessage::from_belief(&flat), std::slice::from_ref(&own[0]), &inbox[0]).unwrap();
        let pooled = vmp_update(&LogMessage::from_belief(&flat), &own).unwrap();
        for (x, y) in shared.probs().iter().zip(pooled.probs()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn fast_policy_evaluation_matches_rollout(loc in simplex(6), obj in simplex(6), c in 0.0f64..4.0) {
        let model = GenerativeModel::for_graph(&WorldGraph::grid(2, 3));
        let loc = CategoricalBelief::new(FactorId::Location, loc).unwrap();
        let obj = object(obj);
        let prefs = PreferenceModel::seek_visible(6, c);
        let mut fast = PolicyEvaluator::new(&model, &loc, &obj, &prefs, 2).unwrap();
        for policy in enumerate_policies(6, 2, 100).unwrap().iter().step_by(5) {
            let a = fast.evaluate(policy).unwrap();
            let b = expected_free_energy(&model, &loc, &obj, policy, &prefs).unwrap();
            prop_assert!((a.g - b.g).abs() < 1e-10);
            prop_assert!((a.info_gain - b.info_gain).abs() < 1e-10);
        }
    }
}
