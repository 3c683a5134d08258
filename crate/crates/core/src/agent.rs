//! A single agent: its generative model, its beliefs and the per-step update.
//!
//! Each timestep runs in two phases so that a communication round can sit in
//! between. [`AgentState::begin_step`] fuses the prior with the agent's own
//! observations; [`AgentState::finish_step`] repeats the fixed point with the
//! received shared messages added to the object factor.

use serde::{Deserialize, Serialize};

use crate::comms::SharedMessage;
use crate::inference::{
    likelihood_message, transition_prediction, vmp_update, CategoricalBelief, FactorId,
    InferenceError, LikelihoodTensor, LogMessage, ModalityId, ObservationEvent, TransitionTensor,
};
use crate::world::{build_a1, build_a2, build_b1, build_b2, AgentObservation, WorldGraph};

/// Fixed-point iterations stop once no belief entry moves by more than this.
pub const VMP_TOLERANCE: f64 = 1e-6;
pub const VMP_MAX_SWEEPS: usize = 16;

/// The agent-side model of the graph world.
#[derive(Debug, Clone)]
pub struct GenerativeModel {
    pub a_location: LikelihoodTensor,
    pub a_visibility: LikelihoodTensor,
    pub b_location: TransitionTensor,
    pub b_object: TransitionTensor,
}

impl GenerativeModel {
    pub fn for_graph(graph: &WorldGraph) -> Self {
        let n = graph.len();
        Self {
            a_location: build_a1(n),
            a_visibility: build_a2(n),
            b_location: build_b1(graph),
            b_object: build_b2(n),
        }
    }

    pub fn num_locations(&self) -> usize {
        self.b_location.states()
    }

    pub fn num_actions(&self) -> usize {
        self.b_location.actions()
    }
}

/// Which environmental modalities an agent receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModalityMask {
    pub location: bool,
    pub visibility: bool,
}

impl Default for ModalityMask {
    fn default() -> Self {
        Self {
            location: true,
            visibility: true,
        }
    }
}

/// Result of the pre-communication half of a step.
#[derive(Debug, Clone)]
pub struct LocalUpdate {
    pub prior_location: LogMessage,
    pub prior_object: LogMessage,
    pub observations: Vec<ObservationEvent>,
    pub q_location: CategoricalBelief,
    pub q_object: CategoricalBelief,
    /// Observation-derived messages into the object factor, from the last sweep.
    pub object_likelihood: Vec<LogMessage>,
    pub sweeps: usize,
}

impl LocalUpdate {
    /// Prior plus own likelihood messages for the object factor, max-normalized.
    pub fn object_message_sum(&self) -> LogMessage {
        LogMessage::sum(
            FactorId::Object,
            self.prior_object.len(),
            std::iter::once(&self.prior_object).chain(&self.object_likelihood),
        )
        .expect("messages share the object factor")
        .max_normalized()
    }
}

#[derive(Debug, Clone)]
pub struct FinalUpdate {
    pub q_location: CategoricalBelief,
    pub q_object: CategoricalBelief,
    pub sweeps: usize,
}

struct FixedPoint {
    q_location: CategoricalBelief,
    q_object: CategoricalBelief,
    object_likelihood: Vec<LogMessage>,
    sweeps: usize,
}

/// Mean-field fixed point over the location and object factors.
fn infer_factors(
    model: &GenerativeModel,
    prior_location: &LogMessage,
    prior_object: &LogMessage,
    observations: &[ObservationEvent],
    extra_object: &[LogMessage],
    init: Option<(&CategoricalBelief, &CategoricalBelief)>,
) -> Result<FixedPoint, InferenceError> {
    let (mut q_location, mut q_object) = match init {
        Some((l, o)) => (l.clone(), o.clone()),
        None => (prior_location.to_belief()?, prior_object.to_belief()?),
    };
    let mut fixed_location = Vec::new();
    let mut visibility = None;
    for obs in observations {
        match obs.modality {
            ModalityId::Location => fixed_location.push(likelihood_message(
                &model.a_location,
                obs,
                &[],
                FactorId::Location,
            )?),
            ModalityId::Visibility => visibility = Some(obs),
            ModalityId::Shared => {
                return Err(InferenceError::ShapeError(
                    "shared messages are passed separately from observations".into(),
                ))
            }
        }
    }

    let mut object_likelihood = Vec::new();
    let mut sweeps = 0;
    while sweeps < VMP_MAX_SWEEPS {
        sweeps += 1;
        let mut location_msgs = fixed_location.clone();
        if let Some(obs) = visibility {
            location_msgs.push(likelihood_message(
                &model.a_visibility,
                obs,
                &[&q_object],
                FactorId::Location,
            )?);
        }
        let next_location = vmp_update(prior_location, &location_msgs)?;

        object_likelihood.clear();
        if let Some(obs) = visibility {
            object_likelihood.push(likelihood_message(
                &model.a_visibility,
                obs,
                &[&next_location],
                FactorId::Object,
            )?);
        }
        let mut object_msgs = object_likelihood.clone();
        object_msgs.extend_from_slice(extra_object);
        let next_object = vmp_update(prior_object, &object_msgs)?;

        let delta =
            max_change(&q_location, &next_location).max(max_change(&q_object, &next_object));
        q_location = next_location;
        q_object = next_object;
        // Without the visibility modality the two factors are decoupled and one sweep is exact.
        if visibility.is_none() || delta < VMP_TOLERANCE {
            break;
        }
    }
    Ok(FixedPoint {
        q_location,
        q_object,
        object_likelihood,
        sweeps,
    })
}

fn max_change(a: &CategoricalBelief, b: &CategoricalBelief) -> f64 {
    a.probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Beliefs of one agent, carried across timesteps.
#[derive(Debug, Clone)]
pub struct AgentState {
    pub id: usize,
    initial_location: CategoricalBelief,
    initial_object: CategoricalBelief,
    q_location: CategoricalBelief,
    q_object: CategoricalBelief,
    last_action: Option<usize>,
    steps: usize,
}

impl AgentState {
    /// An agent that knows its start node and holds `object_prior` over the object location.
    pub fn new(
        id: usize,
        num_locations: usize,
        start: usize,
        object_prior: CategoricalBelief,
    ) -> Result<Self, InferenceError> {
        if object_prior.factor() != FactorId::Object {
            return Err(InferenceError::FactorMismatch {
                expected: FactorId::Object,
                found: object_prior.factor(),
            });
        }
        if object_prior.len() != num_locations || start >= num_locations {
            return Err(InferenceError::ShapeError(format!(
                "agent {id}: start {start} / prior length {} for {num_locations} locations",
                object_prior.len()
            )));
        }
        let location = CategoricalBelief::one_hot(FactorId::Location, num_locations, start);
        Ok(Self {
            id,
            initial_location: location.clone(),
            initial_object: object_prior.clone(),
            q_location: location,
            q_object: object_prior,
            last_action: None,
            steps: 0,
        })
    }

    pub fn location_belief(&self) -> &CategoricalBelief {
        &self.q_location
    }

    pub fn object_belief(&self) -> &CategoricalBelief {
        &self.q_object
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn last_action(&self) -> Option<usize> {
        self.last_action
    }

    /// Prior messages for the coming step: the initial beliefs on the first step,
    /// afterwards the previous posteriors pushed through the dynamics.
    pub fn prior_messages(
        &self,
        model: &GenerativeModel,
    ) -> Result<(LogMessage, LogMessage), InferenceError> {
        if self.steps == 0 {
            return Ok((
                LogMessage::from_belief(&self.initial_location),
                LogMessage::from_belief(&self.initial_object),
            ));
        }
        let action = self.last_action.ok_or_else(|| {
            InferenceError::ShapeError(format!("agent {} has not committed an action", self.id))
        })?;
        Ok((
            transition_prediction(&model.b_location, &self.q_location, action)?,
            transition_prediction(&model.b_object, &self.q_object, 0)?,
        ))
    }

    /// Fuses priors with this step's own observations.
    pub fn begin_step(
        &self,
        model: &GenerativeModel,
        observation: &AgentObservation,
        mask: ModalityMask,
    ) -> Result<LocalUpdate, InferenceError> {
        let (prior_location, prior_object) = self.prior_messages(model)?;
        let mut observations = Vec::with_capacity(2);
        if mask.location {
            observations.push(ObservationEvent::hard(
                ModalityId::Location,
                observation.location,
            ));
        }
        if mask.visibility {
            observations.push(ObservationEvent::hard(
                ModalityId::Visibility,
                observation.visibility.index(),
            ));
        }
        let fp = infer_factors(
            model,
            &prior_location,
            &prior_object,
            &observations,
            &[],
            None,
        )?;
        Ok(LocalUpdate {
            prior_location,
            prior_object,
            observations,
            q_location: fp.q_location,
            q_object: fp.q_object,
            object_likelihood: fp.object_likelihood,
            sweeps: fp.sweeps,
        })
    }

    /// Completes the step with the shared messages received this round.
    pub fn finish_step(
        &mut self,
        model: &GenerativeModel,
        local: &LocalUpdate,
        shared: &[SharedMessage],
    ) -> Result<FinalUpdate, InferenceError> {
        let (q_location, q_object, sweeps) = if shared.is_empty() {
            (local.q_location.clone(), local.q_object.clone(), 0)
        } else {
            let payloads: Vec<LogMessage> = shared.iter().map(|m| m.payload.clone()).collect();
            let fp = infer_factors(
                model,
                &local.prior_location,
                &local.prior_object,
                &local.observations,
                &payloads,
                Some((&local.q_location, &local.q_object)),
            )?;
            (fp.q_location, fp.q_object, fp.sweeps)
        };
        self.q_location = q_location.clone();
        self.q_object = q_object.clone();
        self.steps += 1;
        Ok(FinalUpdate {
            q_location,
            q_object,
            sweeps,
        })
    }

    pub fn commit_action(&mut self, action: usize) {
        self.last_action = Some(action);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Visibility;

    fn model(n: usize) -> GenerativeModel {
        GenerativeModel::for_graph(&WorldGraph::complete(n))
    }

    #[test]
    fn first_step_uses_initial_beliefs() {
        let m = model(3);
        let agent =
            AgentState::new(0, 3, 1, CategoricalBelief::uniform(FactorId::Object, 3)).unwrap();
        let (loc, obj) = agent.prior_messages(&m).unwrap();
        assert_eq!(loc.logits()[1], 0.0);
        assert_eq!(loc.logits()[0], crate::inference::LOG_FLOOR);
        assert!(obj
            .logits()
            .iter()
            .all(|l| (l - obj.logits()[0]).abs() < 1e-15));
    }

    #[test]
    fn miss_at_own_node_matches_bayes() {
        let m = model(3);
        let agent =
            AgentState::new(0, 3, 0, CategoricalBelief::uniform(FactorId::Object, 3)).unwrap();
        let obs = AgentObservation {
            location: 0,
            visibility: Visibility::NotVisible,
        };
        let local = agent.begin_step(&m, &obs, ModalityMask::default()).unwrap();
        let q = local.q_object.probs();
        for (a, b) in q.iter().zip([1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0]) {
            assert!((a - b).abs() < 1e-9, "{q:?}");
        }
        assert!(local.sweeps >= 2);
    }

    #[test]
    fn masked_visibility_leaves_object_belief() {
        let m = model(4);
        let prior =
            CategoricalBelief::from_weights(FactorId::Object, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let mut agent = AgentState::new(0, 4, 2, prior.clone()).unwrap();
        let obs = AgentObservation {
            location: 2,
            visibility: Visibility::Visible,
        };
        let mask = ModalityMask {
            location: true,
            visibility: false,
        };
        let local = agent.begin_step(&m, &obs, mask).unwrap();
        assert!(local.object_likelihood.is_empty());
        agent.finish_step(&m, &local, &[]).unwrap();
        for (a, b) in agent.object_belief().probs().iter().zip(prior.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn location_follows_committed_action() {
        let g = WorldGraph::path(3);
        let m = GenerativeModel::for_graph(&g);
        let mut agent =
            AgentState::new(0, 3, 0, CategoricalBelief::uniform(FactorId::Object, 3)).unwrap();
        let obs = AgentObservation {
            location: 0,
            visibility: Visibility::NotVisible,
        };
        let local = agent.begin_step(&m, &obs, ModalityMask::default()).unwrap();
        agent.finish_step(&m, &local, &[]).unwrap();
        agent.commit_action(1);
        let (loc, _) = agent.prior_messages(&m).unwrap();
        let belief = loc.to_belief().unwrap();
        assert_eq!(belief.argmax(), 1);
        assert!(belief.probs()[1] > 1.0 - 1e-12);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(AgentState::new(0, 3, 3, CategoricalBelief::uniform(FactorId::Object, 3)).is_err());
        assert!(
            AgentState::new(0, 3, 0, CategoricalBelief::uniform(FactorId::Location, 3)).is_err()
        );
    }
}
