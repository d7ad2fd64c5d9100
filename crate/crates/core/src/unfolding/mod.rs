//! From a log and an independence relation to an occurrence net: lpos per
//! trace, their merge into an event structure, the conversion to a net, and
//! removal of events witnessing negative traces.

mod build;
mod cliques;
mod es;
mod lpo;
mod negative;

use thiserror::Error;

use crate::model::ModelError;

pub use build::{build_unfolding, es_to_occnet, unfold_log};
pub use cliques::maximal_cliques;
pub use es::{merge_lpos, reduced_direct_conflicts, EventStructure};
pub use lpo::{lpo_of_trace, Lpo};
pub use negative::{causal_successors, locate_negative_event, prune_negatives};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnfoldError {
    #[error("action {0} is not in the alphabet of the independence relation")]
    UnknownAction(String),
    #[error("negative trace {0:?} contains actions not needed to fire its last action")]
    AssumptionViolated(String),
    #[error("negative trace {0:?} is not part of the unfolded log")]
    NotInUnfolding(String),
    #[error("negative traces must be nonempty")]
    EmptyNegative,
    #[error(transparent)]
    Model(#[from] ModelError),
}
