use std::collections::BTreeSet;

use crate::model::{IndependenceRelation, PetriNet, TransIdx};

fn disjoint<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    !a.iter().any(|x| b.contains(x))
}

/// Structural independence: disjoint presets and neither transition
/// produces into the other's preset. Pairs `(t, t')` with `t < t'`.
pub fn natural_independence(net: &PetriNet) -> BTreeSet<(TransIdx, TransIdx)> {
    let mut out = BTreeSet::new();
    for t in net.transition_ids() {
        for u in net.transition_ids().filter(|u| *u > t) {
            if naturally_independent(net, t, u) {
                out.insert((t, u));
            }
        }
    }
    out
}

pub fn naturally_independent(net: &PetriNet, t: TransIdx, u: TransIdx) -> bool {
    let (a, b) = (net.transition(t), net.transition(u));
    disjoint(&a.preset, &b.preset) && disjoint(&a.postset, &b.preset) && disjoint(&a.preset, &b.postset)
}

/// Transition pairs whose labels are independent. Pairs `(t, t')`, `t < t'`.
pub fn lifted_independence(net: &PetriNet, ind: &IndependenceRelation) -> BTreeSet<(TransIdx, TransIdx)> {
    let mut out = BTreeSet::new();
    for t in net.transition_ids() {
        for u in net.transition_ids().filter(|u| *u > t) {
            if ind.independent(net.label(t), net.label(u)) {
                out.insert((t, u));
            }
        }
    }
    out
}
