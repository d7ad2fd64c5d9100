use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::model::{CondIdx, EventIdx, OccurrenceNet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Event(EventIdx),
    Cond(CondIdx),
}

/// Causality, conflict and concurrency on the nodes of an occurrence net.
///
/// Event-level relations are precomputed as bitsets indexed by event id;
/// condition queries reduce to their generator and consumers.
pub struct StructuralRelations<'a> {
    net: &'a OccurrenceNet,
    /// `past[e]`: events `f ≤ e`.
    past: Vec<FixedBitSet>,
    /// `conflict[e]`: events in conflict with `e`.
    conflict: Vec<FixedBitSet>,
}

pub fn structural_relations(net: &OccurrenceNet) -> StructuralRelations<'_> {
    let n = net.event_capacity();
    let mut past = vec![FixedBitSet::with_capacity(n); n];
    let mut future = vec![FixedBitSet::with_capacity(n); n];
    for e in net.event_ids() {
        past[e.0].insert(e.0);
        for h in &net.event(e).history {
            past[e.0].insert(h.0);
        }
    }
    for e in net.event_ids() {
        for f in past[e.0].ones() {
            future[f].insert(e.0);
        }
    }
    // immediate (structural) conflicts: distinct consumers of one condition
    let mut immediate = vec![FixedBitSet::with_capacity(n); n];
    for b in net.condition_ids() {
        let cons = &net.condition(b).consumers;
        for &x in cons {
            for &y in cons {
                if x != y {
                    immediate[x.0].insert(y.0);
                }
            }
        }
    }
    let mut conflict = vec![FixedBitSet::with_capacity(n); n];
    for e in net.event_ids() {
        let mut reach = FixedBitSet::with_capacity(n);
        for d in past[e.0].ones() {
            reach.union_with(&immediate[d]);
        }
        let mut conf = FixedBitSet::with_capacity(n);
        for d in reach.ones() {
            conf.union_with(&future[d]);
        }
        conflict[e.0] = conf;
    }
    StructuralRelations { net, past, conflict }
}

impl StructuralRelations<'_> {
    pub fn leq_events(&self, e: EventIdx, f: EventIdx) -> bool {
        self.past[f.0].contains(e.0)
    }

    pub fn conflict_events(&self, e: EventIdx, f: EventIdx) -> bool {
        self.conflict[e.0].contains(f.0)
    }

    /// `x ≤ y` (reflexive).
    pub fn leq(&self, x: Node, y: Node) -> bool {
        match (x, y) {
            (Node::Event(e), Node::Event(f)) => self.leq_events(e, f),
            (Node::Event(e), Node::Cond(b)) => {
                self.net.condition(b).generator.is_some_and(|g| self.leq_events(e, g))
            }
            (Node::Cond(b), Node::Event(f)) => self.net.condition(b).consumers.iter().any(|&c| self.leq_events(c, f)),
            (Node::Cond(b), Node::Cond(b2)) => {
                b == b2
                    || self.net.condition(b2).generator.is_some_and(|g| {
                        self.net.condition(b).consumers.iter().any(|&c| self.leq_events(c, g))
                    })
            }
        }
    }

    /// Events whose causal past determines the conflicts of `x`.
    fn anchor(&self, x: Node) -> Option<EventIdx> {
        match x {
            Node::Event(e) => Some(e),
            Node::Cond(b) => self.net.condition(b).generator,
        }
    }

    pub fn conflict(&self, x: Node, y: Node) -> bool {
        match (self.anchor(x), self.anchor(y)) {
            (Some(e), Some(f)) => self.conflict_events(e, f),
            _ => false,
        }
    }

    pub fn co(&self, x: Node, y: Node) -> bool {
        !self.leq(x, y) && !self.leq(y, x) && !self.conflict(x, y)
    }

    /// Unordered pairs `(b, b')`, `b < b'`, of concurrent conditions.
    pub fn co_conditions(&self) -> BTreeSet<(CondIdx, CondIdx)> {
        let conds: Vec<CondIdx> = self.net.condition_ids().collect();
        let mut out = BTreeSet::new();
        for (i, &b) in conds.iter().enumerate() {
            for &b2 in &conds[i + 1..] {
                if self.co(Node::Cond(b), Node::Cond(b2)) {
                    out.insert((b, b2));
                }
            }
        }
        out
    }
}

/// Distinct event pairs `(e, e')`, `e < e'`, enabled together at some
/// reachable marking: every pair of their preset conditions is equal or
/// concurrent.
pub fn coenabled_events(net: &OccurrenceNet) -> BTreeSet<(EventIdx, EventIdx)> {
    let rel = structural_relations(net);
    let events: Vec<EventIdx> = net.event_ids().collect();
    let mut out = BTreeSet::new();
    for (i, &e) in events.iter().enumerate() {
        for &f in &events[i + 1..] {
            let ok = net.event(e).preset.iter().all(|&b| {
                net.event(f)
                    .preset
                    .iter()
                    .all(|&b2| b == b2 || rel.co(Node::Cond(b), Node::Cond(b2)))
            });
            if ok {
                out.insert((e, f));
            }
        }
    }
    out
}
