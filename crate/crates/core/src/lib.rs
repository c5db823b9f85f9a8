//! Attribute inference over social-behavior-attribute networks.
//!
//! The main attack ([`engine::attack`]) propagates a vote capacity from a
//! targeted user over social, behavior-sharing and attribute-sharing
//! neighbors, then lets every reached user vote for its attribute values.
//! The crate also ships the comparison attacks, an evaluation harness, dense
//! reference implementations used as oracles, and a planted-attribute data
//! generator.

pub mod baselines;
pub mod confidence;
pub mod engine;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod snapshot;
pub mod synth;
pub mod transition;

pub use engine::{attack, phase1, phase2, predict_topk, AttackResult, VialParams, VoteVector};
pub use error::{Error, Result};
pub use graph::{build_network, AttributeVocabulary, NetworkBuilder, NodeKind, NodeRef, SbaNetwork, Via};
pub use transition::{materialize_dense, Shares, TransitionOperator};
