//! Core data types: actions, independence relations, events, nets and
//! folding equivalences.

mod action;
mod equivalence;
mod event;
mod independence;
mod occnet;
mod petri;

use thiserror::Error;

pub use action::{parse_word, word_to_string, Action, Alphabet};
pub use equivalence::FoldingEquivalence;
pub use event::{EventData, EventId, EventTable};
pub use independence::{validate_independence, IndependenceRelation};
pub use occnet::{CondIdx, EventIdx, OccCondition, OccEvent, OccPetriNet, OccurrenceNet};
pub use petri::{Marking, PetriNet, Place, PlaceIdx, TransIdx, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid action name {0:?}")]
    InvalidActionName(String),
    #[error("action {0} is not in the alphabet")]
    UnknownAction(String),
    #[error("independence pair ({0}, {0}) is reflexive")]
    ReflexivePair(String),
    #[error("history is not causally closed")]
    NotCausallyClosed,
    #[error("only the root event may be unlabelled")]
    SilentEvent,
    #[error("unknown event {0}")]
    UnknownEvent(u32),
    #[error("flow relation has a cycle")]
    Cyclic,
    #[error("transition {0} is not enabled")]
    NotEnabled(String),
    #[error("a node appears in two classes")]
    OverlappingClasses,
    #[error("malformed equivalence at line {0}")]
    MalformedEquivalence(usize),
}
