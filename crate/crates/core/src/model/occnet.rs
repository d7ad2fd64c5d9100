use std::collections::{BTreeMap, BTreeSet};

use super::{Action, ModelError, PetriNet, PlaceIdx, TransIdx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventIdx(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CondIdx(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccEvent {
    pub label: Action,
    /// Strict causal past, sorted. Never contains the root.
    pub history: Vec<EventIdx>,
    pub preset: Vec<CondIdx>,
    pub postset: Vec<CondIdx>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccCondition {
    /// `None` for initial conditions.
    pub generator: Option<EventIdx>,
    /// Sorted.
    pub consumers: Vec<EventIdx>,
}

/// An occurrence net with stable node ids.
///
/// Removing nodes leaves tombstones so that ids of the remaining nodes stay
/// valid across pruning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceNet {
    events: Vec<Option<OccEvent>>,
    conditions: Vec<Option<OccCondition>>,
}

impl OccurrenceNet {
    /// Builds a net from event labels and conditions given as
    /// `(generator, consumers)`. Histories are derived from the flow.
    pub fn from_parts(labels: Vec<Action>, conditions: Vec<(Option<EventIdx>, Vec<EventIdx>)>) -> Result<Self, ModelError> {
        let n = labels.len();
        let mut presets = vec![Vec::new(); n];
        let mut postsets = vec![Vec::new(); n];
        let mut conds = Vec::with_capacity(conditions.len());
        for (i, (generator, mut consumers)) in conditions.into_iter().enumerate() {
            consumers.sort();
            consumers.dedup();
            for e in generator.iter().chain(consumers.iter()) {
                if e.0 >= n {
                    return Err(ModelError::UnknownEvent(e.0 as u32));
                }
            }
            if let Some(g) = generator {
                postsets[g.0].push(CondIdx(i));
            }
            for e in &consumers {
                presets[e.0].push(CondIdx(i));
            }
            conds.push(OccCondition { generator, consumers });
        }
        // direct predecessors, then histories in topological order
        let mut preds: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (e, pre) in presets.iter().enumerate() {
            for b in pre {
                if let Some(g) = conds[b.0].generator {
                    preds[e].insert(g.0);
                }
            }
        }
        let order = topo_order(&preds).ok_or(ModelError::Cyclic)?;
        let mut hist: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for &e in &order {
            let mut h = BTreeSet::new();
            for &p in &preds[e] {
                h.insert(p);
                h.extend(hist[p].iter().copied());
            }
            hist[e] = h;
        }
        let events = labels
            .into_iter()
            .enumerate()
            .map(|(i, label)| {
                Some(OccEvent {
                    label,
                    history: hist[i].iter().map(|&x| EventIdx(x)).collect(),
                    preset: std::mem::take(&mut presets[i]),
                    postset: std::mem::take(&mut postsets[i]),
                })
            })
            .collect();
        Ok(OccurrenceNet {
            events,
            conditions: conds.into_iter().map(Some).collect(),
        })
    }

    /// Size of the id space, including removed events.
    pub fn event_capacity(&self) -> usize {
        self.events.len()
    }

    pub fn condition_capacity(&self) -> usize {
        self.conditions.len()
    }

    pub fn event_ids(&self) -> impl Iterator<Item = EventIdx> + '_ {
        self.events.iter().enumerate().filter(|(_, e)| e.is_some()).map(|(i, _)| EventIdx(i))
    }

    pub fn condition_ids(&self) -> impl Iterator<Item = CondIdx> + '_ {
        self.conditions.iter().enumerate().filter(|(_, c)| c.is_some()).map(|(i, _)| CondIdx(i))
    }

    pub fn has_event(&self, e: EventIdx) -> bool {
        matches!(self.events.get(e.0), Some(Some(_)))
    }

    pub fn has_condition(&self, b: CondIdx) -> bool {
        matches!(self.conditions.get(b.0), Some(Some(_)))
    }

    /// Panics if `e` was removed.
    pub fn event(&self, e: EventIdx) -> &OccEvent {
        self.events[e.0].as_ref().expect("removed event")
    }

    /// Panics if `b` was removed.
    pub fn condition(&self, b: CondIdx) -> &OccCondition {
        self.conditions[b.0].as_ref().expect("removed condition")
    }

    pub fn num_events(&self) -> usize {
        self.events.iter().flatten().count()
    }

    pub fn num_conditions(&self) -> usize {
        self.conditions.iter().flatten().count()
    }

    pub fn num_arcs(&self) -> usize {
        self.events.iter().flatten().map(|e| e.preset.len() + e.postset.len()).sum()
    }

    pub fn label(&self, e: EventIdx) -> &Action {
        &self.event(e).label
    }

    pub fn initial_conditions(&self) -> impl Iterator<Item = CondIdx> + '_ {
        self.condition_ids().filter(|b| self.condition(*b).generator.is_none())
    }

    /// `e ≤ f`.
    pub fn leq(&self, e: EventIdx, f: EventIdx) -> bool {
        e == f || self.event(f).history.binary_search(&e).is_ok()
    }

    /// `[e]` as a sorted list.
    pub fn causal_past(&self, e: EventIdx) -> Vec<EventIdx> {
        let mut v = self.event(e).history.clone();
        if let Err(pos) = v.binary_search(&e) {
            v.insert(pos, e);
        }
        v
    }

    /// Finds the event with this label and strict history.
    pub fn find_event(&self, label: &Action, history: &[EventIdx]) -> Option<EventIdx> {
        self.event_ids()
            .find(|&e| self.event(e).label == *label && self.event(e).history == history)
    }

    /// Removes events and conditions. Consumer lists of surviving conditions
    /// drop the removed events.
    pub fn remove_nodes(&self, events: &BTreeSet<EventIdx>, conditions: &BTreeSet<CondIdx>) -> OccurrenceNet {
        let mut out = self.clone();
        for e in events {
            if let Some(slot) = out.events.get_mut(e.0) {
                *slot = None;
            }
        }
        for b in conditions {
            if let Some(slot) = out.conditions.get_mut(b.0) {
                *slot = None;
            }
        }
        for c in out.conditions.iter_mut().flatten() {
            c.consumers.retain(|e| !events.contains(e));
        }
        for e in out.events.iter_mut().flatten() {
            e.preset.retain(|b| !conditions.contains(b));
            e.postset.retain(|b| !conditions.contains(b));
        }
        out
    }

    /// The net as a Petri net, one place per condition (marked iff initial)
    /// and one transition per event, in id order.
    pub fn to_petri_net(&self) -> OccPetriNet {
        let mut net = PetriNet::new("unfolding");
        let mut place_of = BTreeMap::new();
        let mut trans_of = BTreeMap::new();
        let mut conds = Vec::new();
        let mut events = Vec::new();
        for b in self.condition_ids() {
            let init = u32::from(self.condition(b).generator.is_none());
            place_of.insert(b, net.add_place(format!("b{}", b.0), init));
            conds.push(b);
        }
        for e in self.event_ids() {
            trans_of.insert(e, net.add_transition(format!("e{}", e.0), self.label(e).clone()));
            events.push(e);
        }
        for e in self.event_ids() {
            let t = trans_of[&e];
            for b in &self.event(e).preset {
                net.add_input_arc(place_of[b], t);
            }
            for b in &self.event(e).postset {
                net.add_output_arc(t, place_of[b]);
            }
        }
        OccPetriNet {
            net,
            events,
            conditions: conds,
            trans_of,
            place_of,
        }
    }
}

/// Petri net view of an occurrence net together with node maps.
#[derive(Clone, Debug)]
pub struct OccPetriNet {
    pub net: PetriNet,
    /// Transition index to event.
    pub events: Vec<EventIdx>,
    /// Place index to condition.
    pub conditions: Vec<CondIdx>,
    pub trans_of: BTreeMap<EventIdx, TransIdx>,
    pub place_of: BTreeMap<CondIdx, PlaceIdx>,
}

fn topo_order(preds: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    let n = preds.len();
    let mut indeg: Vec<usize> = preds.iter().map(BTreeSet::len).collect();
    let mut succs = vec![Vec::new(); n];
    for (e, ps) in preds.iter().enumerate() {
        for &p in ps {
            succs[p].push(e);
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&e| indeg[e] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(e) = ready.pop() {
        order.push(e);
        for &s in &succs[e] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(s);
            }
        }
    }
    (order.len() == n).then_some(order)
}
