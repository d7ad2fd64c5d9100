use std::collections::{BTreeMap, BTreeSet};

use super::Lpo;
use crate::model::{Action, EventData, EventId, EventTable, IndependenceRelation};

/// A prime event structure over hash-consed events, root included.
///
/// Causality is history containment. Conflict is the hereditary closure of
/// the reduced direct conflicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventStructure {
    events: BTreeMap<EventId, EventData>,
    candidates: BTreeSet<(EventId, EventId)>,
    direct: BTreeSet<(EventId, EventId)>,
}

/// Unions the event sets of `lpos` and computes direct conflicts between
/// causally unrelated events with dependent labels.
pub fn merge_lpos(table: &EventTable, lpos: &[Lpo], ind: &IndependenceRelation) -> EventStructure {
    let mut events = BTreeMap::new();
    events.insert(EventTable::ROOT, table.get(EventTable::ROOT).clone());
    for lpo in lpos {
        for &e in &lpo.events {
            events.entry(e).or_insert_with(|| table.get(e).clone());
        }
    }
    let ids: Vec<EventId> = events.keys().copied().collect();
    let mut candidates = BTreeSet::new();
    for (i, &e) in ids.iter().enumerate() {
        for &f in &ids[i + 1..] {
            let (de, df) = (&events[&e], &events[&f]);
            if !de.history.contains(&f)
                && !df.history.contains(&e)
                && ind.labels_dependent(de.label.as_ref(), df.label.as_ref())
            {
                candidates.insert((e, f));
            }
        }
    }
    let mut es = EventStructure {
        events,
        candidates,
        direct: BTreeSet::new(),
    };
    es.direct = reduce(&es);
    es
}

/// Keeps the candidate pairs not dominated by another candidate pair below
/// them.
pub fn reduced_direct_conflicts(es: &EventStructure) -> BTreeSet<(EventId, EventId)> {
    es.direct.clone()
}

fn reduce(es: &EventStructure) -> BTreeSet<(EventId, EventId)> {
    let is_candidate = |x: EventId, y: EventId| {
        let key = if x < y { (x, y) } else { (y, x) };
        es.candidates.contains(&key)
    };
    es.candidates
        .iter()
        .filter(|&&(e, f)| {
            let pe = es.causal_past(e);
            let pf = es.causal_past(f);
            !pe.iter().any(|&e2| pf.iter().any(|&f2| (e2, f2) != (e, f) && is_candidate(e2, f2)))
        })
        .copied()
        .collect()
}

impl EventStructure {
    /// All events, root first.
    pub fn events(&self) -> impl Iterator<Item = EventId> + '_ {
        self.events.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, e: EventId) -> bool {
        self.events.contains_key(&e)
    }

    pub fn label(&self, e: EventId) -> Option<&Action> {
        self.events[&e].label.as_ref()
    }

    pub fn history(&self, e: EventId) -> &BTreeSet<EventId> {
        &self.events[&e].history
    }

    pub fn causal_past(&self, e: EventId) -> BTreeSet<EventId> {
        let mut p = self.history(e).clone();
        p.insert(e);
        p
    }

    pub fn leq(&self, e: EventId, f: EventId) -> bool {
        e == f || self.history(f).contains(&e)
    }

    /// Unreduced direct-conflict candidates, as ordered pairs `(min, max)`.
    pub fn candidate_conflicts(&self) -> &BTreeSet<(EventId, EventId)> {
        &self.candidates
    }

    pub fn direct_conflicts(&self) -> &BTreeSet<(EventId, EventId)> {
        &self.direct
    }

    /// `e # f`: some direct conflict lies below the pair.
    pub fn in_conflict(&self, e: EventId, f: EventId) -> bool {
        self.direct
            .iter()
            .any(|&(x, y)| (self.leq(x, e) && self.leq(y, f)) || (self.leq(x, f) && self.leq(y, e)))
    }

    /// Causally closed, conflict free and containing the root.
    pub fn is_configuration(&self, set: &BTreeSet<EventId>) -> bool {
        set.contains(&EventTable::ROOT)
            && set.iter().all(|e| self.contains(*e) && self.history(*e).is_subset(set))
            && !self.direct.iter().any(|(x, y)| set.contains(x) && set.contains(y))
    }
}
