//! Execution and relational semantics of Petri nets and occurrence nets.

mod coverability;
mod firing;
mod independence;
mod relations;
mod traces;

use thiserror::Error;

use crate::model::ModelError;

pub use coverability::{coenabled_in, coenabled_transitions, coverability_set, coverability_tree, CoverNode, coverable, is_safe, OmegaMarking, SafetyVerdict};
pub use firing::{
    check_witness, enabled, fire, observations_upto, reachable_markings, replay, replay_from, ReplayOutcome, DEFAULT_BUDGET,
};
pub use independence::{lifted_independence, natural_independence, naturally_independent};
pub use relations::{coenabled_events, structural_relations, Node, StructuralRelations};
pub use traces::{es_configurations, mazurkiewicz_class};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("state budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("enumeration limit of {0} exceeded")]
    LimitExceeded(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}
