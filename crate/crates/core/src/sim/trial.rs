use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{AgentState, GenerativeModel};
use crate::comms::{broadcast_round, AgentSnapshot};
use crate::inference::{CategoricalBelief, FactorId, InferenceError};
use crate::planning::{
    enumerate_policies, select_action, PlanningError, Policy, PolicyEvaluator, PreferenceModel,
};
use crate::rng::{derive_seed, rng_from_seed, SimRng};
use crate::world::{env_observe, env_step, Environment, ObjectPlacement, Visibility, WorldState};

use super::config::{ConfigError, Movement, Planner, ScenarioConfig};
use super::trace::{BeliefTrace, TraceEntry};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("inference failed: {0}")]
    Inference(#[from] InferenceError),
    #[error("planning failed: {0}")]
    Planning(#[from] PlanningError),
}

/// Whether [`simulate`] records per-step beliefs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceLevel {
    Full,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub found: bool,
    /// One-based step on which the object was found.
    pub steps_to_find: Option<usize>,
    pub trace: BeliefTrace,
    pub config_hash: String,
    pub seed: u64,
}

/// Runs one trial with a full trace.
pub fn run_trial(config: &ScenarioConfig) -> Result<TrialResult, SimError> {
    simulate(config, TraceLevel::Full)
}

enum Chooser {
    Scripted(Vec<Vec<usize>>),
    Frozen,
    Random,
    Planning {
        policies: Vec<Policy>,
        prefs: PreferenceModel,
    },
}

pub fn simulate(config: &ScenarioConfig, level: TraceLevel) -> Result<TrialResult, SimError> {
    config.validate()?;
    let n = config.num_locations();
    let model = GenerativeModel::for_graph(&config.graph);
    let env = Environment::new(config.graph.clone());

    let mut agents = config
        .agents
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let prior = CategoricalBelief::new(FactorId::Object, config.agent_prior(i))?;
            AgentState::new(i, n, spec.start, prior)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut env_rng = rng_from_seed(derive_seed(config.seed, 0));
    let mut agent_rngs: Vec<SimRng> = (0..agents.len())
        .map(|i| rng_from_seed(derive_seed(config.seed, 1 + i as u64)))
        .collect();

    let chooser = if let Some(routes) = &config.routes {
        Chooser::Scripted(routes.clone())
    } else if config.movement == Movement::Frozen {
        Chooser::Frozen
    } else if config.planner == Planner::Random {
        Chooser::Random
    } else {
        Chooser::Planning {
            policies: enumerate_policies(model.num_actions(), config.horizon, config.policy_cap)?,
            prefs: PreferenceModel::seek_visible(n, config.visible_preference),
        }
    };

    let mut state = WorldState {
        agent_positions: config.agents.iter().map(|a| a.start).collect(),
        object: config.object,
        t: 0,
    };
    let mut trace = BeliefTrace::new(agents.len(), n);
    let mut steps_to_find = None;

    for t in 0..config.steps {
        let mut bundle = env_observe(&env, &state, &mut env_rng);
        if let Some(forced) = &config.forced_visibility {
            for (obs, script) in bundle.per_agent.iter_mut().zip(forced) {
                if let Some(v) = script.get(t) {
                    obs.visibility = *v;
                }
            }
        }
        let found = bundle
            .per_agent
            .iter()
            .zip(&state.agent_positions)
            .any(|(obs, pos)| {
                obs.visibility == Visibility::Visible && state.object == ObjectPlacement::At(*pos)
            });

        let locals = agents
            .iter()
            .zip(&bundle.per_agent)
            .map(|(agent, obs)| agent.begin_step(&model, obs, config.modalities))
            .collect::<Result<Vec<_>, _>>()?;
        let snapshots: Vec<AgentSnapshot<'_>> = locals
            .iter()
            .map(|l| AgentSnapshot {
                object_belief: &l.q_object,
                object_likelihood: &l.object_likelihood,
            })
            .collect();
        let inboxes = broadcast_round(&snapshots, config.comm_mode)?;
        for ((agent, local), inbox) in agents.iter_mut().zip(&locals).zip(&inboxes) {
            agent.finish_step(&model, local, inbox)?;
        }

        let actions = if found {
            None
        } else {
            let mut acts = Vec::with_capacity(agents.len());
            for (i, agent) in agents.iter().enumerate() {
                let a = match &chooser {
                    Chooser::Scripted(routes) => routes[i]
                        .get(t)
                        .copied()
                        .unwrap_or(state.agent_positions[i]),
                    Chooser::Frozen => state.agent_positions[i],
                    Chooser::Random => agent_rngs[i].gen_range(0..model.num_actions()),
                    Chooser::Planning { policies, prefs } => {
                        let mut evaluator = PolicyEvaluator::new(
                            &model,
                            agent.location_belief(),
                            agent.object_belief(),
                            prefs,
                            config.horizon,
                        )?;
                        let efes = policies
                            .iter()
                            .map(|p| evaluator.evaluate(p))
                            .collect::<Result<Vec<_>, _>>()?;
                        select_action(&efes, config.temperature, &mut agent_rngs[i])?
                    }
                };
                acts.push(a);
            }
            Some(acts)
        };

        if level == TraceLevel::Full {
            for (i, agent) in agents.iter().enumerate() {
                trace.push(TraceEntry {
                    t,
                    agent: i,
                    position: state.agent_positions[i],
                    observation: bundle.per_agent[i],
                    object_belief: agent.object_belief().probs().to_vec(),
                    location_belief: agent.location_belief().probs().to_vec(),
                    local_object_logits: locals[i].object_message_sum(),
                    received: inboxes[i].clone(),
                    action: actions.as_ref().map(|a| a[i]),
                });
            }
        }

        match actions {
            None => {
                steps_to_find = Some(t + 1);
                break;
            }
            Some(acts) => {
                for (agent, a) in agents.iter_mut().zip(&acts) {
                    agent.commit_action(*a);
                }
                state = env_step(&state, &acts, &config.graph);
            }
        }
    }

    Ok(TrialResult {
        found: steps_to_find.is_some(),
        steps_to_find,
        trace,
        config_hash: config.hash(),
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comms::CommMode;
    use crate::sim::AgentSpec;
    use crate::world::WorldGraph;

    fn config(mode: CommMode) -> ScenarioConfig {
        let mut c = ScenarioConfig::new(
            WorldGraph::default_world(),
            vec![
                AgentSpec {
                    start: 0,
                    prior: None,
                },
                AgentSpec {
                    start: 14,
                    prior: None,
                },
            ],
            mode,
        );
        c.object = ObjectPlacement::At(7);
        c.steps = 6;
        c
    }

    #[test]
    fn absent_object_is_never_found() {
        let mut c = config(CommMode::LikelihoodSharing);
        c.object = ObjectPlacement::Absent;
        let r = run_trial(&c).unwrap();
        assert!(!r.found);
        assert_eq!(r.steps_to_find, None);
        assert_eq!(r.trace.entries.len(), 6 * 2);
    }

    #[test]
    fn trace_has_one_entry_per_step_and_agent() {
        let r = run_trial(&config(CommMode::PosteriorSharing)).unwrap();
        let steps = r.steps_to_find.unwrap_or(6);
        assert_eq!(r.trace.entries.len(), steps * 2);
        for (k, e) in r.trace.entries.iter().enumerate() {
            assert_eq!((e.t, e.agent), (k / 2, k % 2));
            let total: f64 = e.object_belief.iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert_eq!(e.received.len(), 1);
        }
    }

    #[test]
    fn repeat_runs_are_identical() {
        let c = config(CommMode::LikelihoodSharing);
        assert_eq!(run_trial(&c).unwrap(), run_trial(&c).unwrap());
    }

    #[test]
    fn starting_on_object_is_found_on_first_visible_draw() {
        let mut c = config(CommMode::None);
        c.agents = vec![AgentSpec {
            start: 7,
            prior: None,
        }];
        c.forced_visibility = Some(vec![vec![Visibility::Visible]]);
        let r = run_trial(&c).unwrap();
        assert_eq!(r.steps_to_find, Some(1));
        assert_eq!(r.trace.entries[0].action, None);
    }

    #[test]
    fn trace_off_keeps_outcome() {
        let c = config(CommMode::None);
        let full = simulate(&c, TraceLevel::Full).unwrap();
        let off = simulate(&c, TraceLevel::Off).unwrap();
        assert!(off.trace.is_empty());
        assert_eq!(full.steps_to_find, off.steps_to_find);
    }

    #[test]
    fn invalid_config_is_reported() {
        let mut c = config(CommMode::None);
        c.steps = 0;
        assert!(matches!(
            simulate(&c, TraceLevel::Off),
            Err(SimError::Config(_))
        ));
    }
}
