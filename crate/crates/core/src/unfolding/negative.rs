use std::collections::{BTreeSet, HashMap};

use super::{lpo_of_trace, UnfoldError};
use crate::model::{word_to_string, Action, CondIdx, EventIdx, EventTable, IndependenceRelation, OccurrenceNet};

/// Locates the unfolding event whose local configuration is the lpo of the
/// negative trace `sigma`.
pub fn locate_negative_event(net: &OccurrenceNet, sigma: &[Action], ind: &IndependenceRelation) -> Result<EventIdx, UnfoldError> {
    let index: HashMap<(&Action, &[EventIdx]), EventIdx> = net
        .event_ids()
        .map(|e| ((&net.event(e).label, net.event(e).history.as_slice()), e))
        .collect();
    let mut table = EventTable::new();
    let lpo = lpo_of_trace(&mut table, sigma, ind)?;
    let last = lpo.last.ok_or(UnfoldError::EmptyNegative)?;
    let missing = || UnfoldError::NotInUnfolding(word_to_string(sigma));
    // ids in the fresh table are created histories-first
    let mut image = HashMap::new();
    for &e in lpo.events.iter().filter(|e| **e != EventTable::ROOT) {
        let mut hist: Vec<EventIdx> = table
            .history(e)
            .iter()
            .filter(|h| **h != EventTable::ROOT)
            .map(|h| image[h])
            .collect();
        hist.sort();
        let label = table.label(e).expect("non-root");
        let found = *index.get(&(label, hist.as_slice())).ok_or_else(missing)?;
        image.insert(e, found);
    }
    if table.causal_past(last) != lpo.events {
        return Err(UnfoldError::AssumptionViolated(word_to_string(sigma)));
    }
    Ok(image[&last])
}

/// Events strictly above some event of `events` that are not themselves in
/// `events`. Nonempty only when the inputs break the one-event-per-negative
/// assumption.
pub fn causal_successors(net: &OccurrenceNet, events: &BTreeSet<EventIdx>) -> BTreeSet<EventIdx> {
    net.event_ids()
        .filter(|f| !events.contains(f) && events.iter().any(|&e| net.leq(e, *f)))
        .collect()
}

/// Removes each located event, everything causally above it and the
/// conditions they generate. Consumed conditions survive. Node ids are kept.
pub fn prune_negatives(net: &OccurrenceNet, events: &BTreeSet<EventIdx>) -> OccurrenceNet {
    let mut removed: BTreeSet<EventIdx> = events.iter().copied().filter(|e| net.has_event(*e)).collect();
    removed.extend(causal_successors(net, &removed));
    let conds: BTreeSet<CondIdx> = net
        .condition_ids()
        .filter(|b| net.condition(*b).generator.is_some_and(|g| removed.contains(&g)))
        .collect();
    net.remove_nodes(&removed, &conds)
}
