//! Multi-agent active inference on graph worlds.
//!
//! Agents hold a two-factor categorical generative model (their own location
//! and the location of a hidden object), update beliefs by variational message
//! passing, plan by expected free energy and exchange messages about the object
//! factor under one of two schemes: posterior sharing or likelihood sharing.

pub mod agent;
pub mod comms;
pub mod inference;
pub mod planning;
pub mod rng;
pub mod sim;
pub mod world;

pub use agent::{AgentState, GenerativeModel, LocalUpdate, ModalityMask};
pub use comms::{CommMode, SharedMessage};
pub use inference::{
    CategoricalBelief, FactorId, InferenceError, LikelihoodTensor, LogMessage, ModalityId,
    ObservationEvent, TransitionTensor,
};
pub use planning::{EfeBreakdown, Policy, PreferenceModel};
pub use sim::{BeliefTrace, ScenarioConfig, TrialResult};
pub use world::{Visibility, WorldGraph, WorldState};
