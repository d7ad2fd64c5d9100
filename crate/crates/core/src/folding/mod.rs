//! Folding an occurrence net along an equivalence, and the sequence
//! preserving (SP), independence preserving (IP) and removal aware (RA)
//! checks on equivalences.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{Action, CondIdx, EventIdx, FoldingEquivalence, IndependenceRelation, OccurrenceNet, PetriNet, PlaceIdx, TransIdx};
use crate::semantics::{coenabled_transitions, structural_relations, Node, SemanticsError, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoldError {
    #[error("event class {0} mixes labels")]
    LabelClash(usize),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Which event pairs the IP biconditional quantifies over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IpScope {
    /// Pairs whose images are co-enabled in the folded net.
    #[default]
    Coe,
    /// All pairs.
    All,
}

/// A folded net with the maps from unfolding nodes to net nodes.
#[derive(Clone, Debug)]
pub struct Folded {
    pub net: PetriNet,
    pub transition_of: BTreeMap<EventIdx, TransIdx>,
    pub place_of: BTreeMap<CondIdx, PlaceIdx>,
}

/// Quotient of `net` by `eq`: one place per condition class, one transition
/// per event class, arcs lifted pointwise, and as many initial tokens in a
/// place as its class has initial conditions.
pub fn fold(net: &OccurrenceNet, eq: &FoldingEquivalence) -> Result<PetriNet, FoldError> {
    fold_with_maps(net, eq).map(|f| f.net)
}

pub fn fold_with_maps(net: &OccurrenceNet, eq: &FoldingEquivalence) -> Result<Folded, FoldError> {
    let eq = eq.normalized_for(net);
    let mut out = PetriNet::new("folded");
    let mut labels: Vec<Option<Action>> = vec![None; eq.num_event_classes()];
    for (e, c) in eq.events() {
        match &labels[c] {
            Some(l) if l != net.label(e) => return Err(FoldError::LabelClash(c)),
            _ => labels[c] = Some(net.label(e).clone()),
        }
    }
    let places: Vec<PlaceIdx> = (0..eq.num_condition_classes()).map(|k| out.add_place(format!("p{k}"), 0)).collect();
    let transitions: Vec<TransIdx> = labels
        .into_iter()
        .enumerate()
        .map(|(k, l)| out.add_transition(format!("t{k}"), l.expect("class nonempty")))
        .collect();
    let mut place_of = BTreeMap::new();
    for (b, c) in eq.conditions() {
        place_of.insert(b, places[c]);
        if net.condition(b).generator.is_none() {
            let p = places[c];
            let n = out.initial_marking().get(p);
            out.set_initial(p, n + 1);
        }
    }
    let mut transition_of = BTreeMap::new();
    for (e, c) in eq.events() {
        let t = transitions[c];
        transition_of.insert(e, t);
        for b in &net.event(e).preset {
            out.add_input_arc(place_of[b], t);
        }
        for b in &net.event(e).postset {
            out.add_output_arc(t, place_of[b]);
        }
    }
    Ok(Folded {
        net: out,
        transition_of,
        place_of,
    })
}

/// Class data of every live event under a normalized equivalence.
struct ClassView {
    class: BTreeMap<EventIdx, usize>,
    pre: BTreeMap<EventIdx, BTreeSet<usize>>,
    post: BTreeMap<EventIdx, BTreeSet<usize>>,
}

impl ClassView {
    fn new(net: &OccurrenceNet, eq: &FoldingEquivalence) -> Self {
        let cls = |bs: &[CondIdx]| bs.iter().map(|b| eq.condition_class(*b).expect("normalized")).collect();
        ClassView {
            class: eq.events().collect(),
            pre: net.event_ids().map(|e| (e, cls(&net.event(e).preset))).collect(),
            post: net.event_ids().map(|e| (e, cls(&net.event(e).postset))).collect(),
        }
    }

    fn touching(&self, e: EventIdx, f: EventIdx) -> bool {
        !self.pre[&e].is_disjoint(&self.pre[&f]) || !self.pre[&e].is_disjoint(&self.post[&f]) || !self.post[&e].is_disjoint(&self.pre[&f])
    }
}

fn sp_holds(net: &OccurrenceNet, view: &ClassView) -> bool {
    let mut rep: BTreeMap<usize, EventIdx> = BTreeMap::new();
    for e in net.event_ids() {
        match rep.get(&view.class[&e]) {
            Some(&r) => {
                if net.label(r) != net.label(e) || view.pre[&r] != view.pre[&e] {
                    return false;
                }
            }
            None => {
                rep.insert(view.class[&e], e);
            }
        }
    }
    true
}

/// Merged events share their label and their set of preset classes.
pub fn is_sp(net: &OccurrenceNet, eq: &FoldingEquivalence) -> bool {
    let eq = eq.normalized_for(net);
    sp_holds(net, &ClassView::new(net, &eq))
}

/// SP, plus: for every event pair in scope, independent labels iff presets
/// and postsets of their classes do not touch; and concurrent conditions are
/// never merged.
pub fn is_ip(net: &OccurrenceNet, eq: &FoldingEquivalence, ind: &IndependenceRelation, scope: IpScope) -> Result<bool, FoldError> {
    let eq = eq.normalized_for(net);
    let view = ClassView::new(net, &eq);
    if !sp_holds(net, &view) {
        return Ok(false);
    }
    let rel = structural_relations(net);
    let conds: Vec<CondIdx> = net.condition_ids().collect();
    for (i, &b) in conds.iter().enumerate() {
        for &b2 in &conds[i + 1..] {
            if eq.condition_class(b) == eq.condition_class(b2) && rel.co(Node::Cond(b), Node::Cond(b2)) {
                return Ok(false);
            }
        }
    }
    let events: Vec<EventIdx> = net.event_ids().collect();
    let in_scope: Box<dyn Fn(EventIdx, EventIdx) -> bool> = match scope {
        IpScope::All => Box::new(|_, _| true),
        IpScope::Coe => {
            let folded = fold_with_maps(net, &eq)?;
            let coe = coenabled_transitions(&folded.net, DEFAULT_BUDGET)?;
            let map = folded.transition_of;
            Box::new(move |e, f| {
                let (t, u) = (map[&e], map[&f]);
                coe.contains(&(t.min(u), t.max(u)))
            })
        }
    };
    for (i, &e) in events.iter().enumerate() {
        for &f in &events[i + 1..] {
            if !in_scope(e, f) {
                continue;
            }
            let independent = ind.independent(net.label(e), net.label(f));
            if independent == view.touching(e, f) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// SP on the pruned net, plus: no surviving event with the label of a
/// removed negative event has its preset classes inside that event's preset
/// classes.
pub fn is_ra(full: &OccurrenceNet, star: &OccurrenceNet, eq: &FoldingEquivalence, neg_events: &BTreeSet<EventIdx>) -> bool {
    let eq_full = eq.normalized_for(full);
    let restricted = FoldingEquivalence::from_keys(
        star.event_ids().map(|e| (e, eq_full.event_class(e))),
        star.condition_ids().map(|b| (b, eq_full.condition_class(b))),
    );
    if !is_sp(star, &restricted) {
        return false;
    }
    let classes = |bs: &[CondIdx]| -> BTreeSet<usize> { bs.iter().map(|b| eq_full.condition_class(*b).expect("normalized")).collect() };
    for &n in neg_events {
        let neg_pre = classes(&full.event(n).preset);
        for e in star.event_ids() {
            if star.label(e) == full.label(n) && classes(&star.event(e).preset).is_subset(&neg_pre) {
                return false;
            }
        }
    }
    true
}
