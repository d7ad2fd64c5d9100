use std::collections::{BTreeSet, VecDeque};

use super::SemanticsError;
use crate::model::{Action, EventId, EventTable, IndependenceRelation};
use crate::unfolding::EventStructure;

/// All words obtained from `word` by repeatedly swapping adjacent
/// independent actions.
pub fn mazurkiewicz_class(word: &[Action], ind: &IndependenceRelation, limit: usize) -> Result<BTreeSet<Vec<Action>>, SemanticsError> {
    let mut seen: BTreeSet<Vec<Action>> = [word.to_vec()].into();
    let mut queue: VecDeque<Vec<Action>> = [word.to_vec()].into();
    while let Some(w) = queue.pop_front() {
        for i in 1..w.len() {
            if ind.independent(&w[i - 1], &w[i]) {
                let mut v = w.clone();
                v.swap(i - 1, i);
                if seen.insert(v.clone()) {
                    if seen.len() > limit {
                        return Err(SemanticsError::LimitExceeded(limit));
                    }
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(seen)
}

/// All configurations of an event structure, each containing the root.
pub fn es_configurations(es: &EventStructure, limit: usize) -> Result<BTreeSet<BTreeSet<EventId>>, SemanticsError> {
    let root: BTreeSet<EventId> = [EventTable::ROOT].into();
    let mut seen: BTreeSet<BTreeSet<EventId>> = [root.clone()].into();
    let mut queue: VecDeque<BTreeSet<EventId>> = [root].into();
    while let Some(c) = queue.pop_front() {
        for e in es.events() {
            if c.contains(&e) || !es.history(e).is_subset(&c) || c.iter().any(|&f| es.in_conflict(e, f)) {
                continue;
            }
            let mut next = c.clone();
            next.insert(e);
            if seen.insert(next.clone()) {
                if seen.len() > limit {
                    return Err(SemanticsError::LimitExceeded(limit));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}
