use std::collections::BTreeSet;

use super::UnfoldError;
use crate::model::{Action, EventId, EventTable, IndependenceRelation};

/// The labelled partial order of a trace, as a causally closed event set
/// that always contains the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lpo {
    pub events: BTreeSet<EventId>,
    /// Event of the last action; `None` for the empty trace.
    pub last: Option<EventId>,
}

/// Builds the lpo of `trace` event by event. Each new `a`-event depends on
/// the causal pasts of all earlier events whose label is dependent with `a`
/// (the root included).
pub fn lpo_of_trace(table: &mut EventTable, trace: &[Action], ind: &IndependenceRelation) -> Result<Lpo, UnfoldError> {
    let mut events: BTreeSet<EventId> = [EventTable::ROOT].into();
    let mut last = None;
    for a in trace {
        if !ind.alphabet().contains(a) {
            return Err(UnfoldError::UnknownAction(a.to_string()));
        }
        let mut history = BTreeSet::new();
        for &e in &events {
            if ind.labels_dependent(table.label(e), Some(a)) {
                history.insert(e);
                history.extend(table.history(e).iter().copied());
            }
        }
        let e = table.mk_event(Some(a.clone()), history)?;
        events.insert(e);
        last = Some(e);
    }
    Ok(Lpo { events, last })
}
