use std::collections::{BTreeSet, HashSet, VecDeque};

use super::SemanticsError;
use crate::model::{Marking, PetriNet, PlaceIdx, TransIdx};

/// Token count where `None` is ω.
pub type OmegaMarking = Vec<Option<u32>>;

fn dense(net: &PetriNet, m: &Marking) -> OmegaMarking {
    let mut v = vec![Some(0); net.num_places()];
    for (p, n) in m.iter() {
        v[p.0] = Some(n);
    }
    v
}

fn enabled_omega(net: &PetriNet, m: &OmegaMarking, t: TransIdx) -> bool {
    net.transition(t).preset.iter().all(|p| m[p.0] != Some(0))
}

fn fire_omega(net: &PetriNet, m: &OmegaMarking, t: TransIdx) -> OmegaMarking {
    let mut next = m.clone();
    let tr = net.transition(t);
    for p in &tr.preset {
        if let Some(n) = next[p.0].as_mut() {
            *n -= 1;
        }
    }
    for p in &tr.postset {
        if let Some(n) = next[p.0].as_mut() {
            *n += 1;
        }
    }
    next
}

/// `a ≤ b` pointwise with ω as top.
fn covered_by(a: &OmegaMarking, b: &OmegaMarking) -> bool {
    a.iter().zip(b).all(|(x, y)| match (x, y) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    })
}

/// A node of a Karp–Miller tree: its label and the node and transition it
/// was first reached from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverNode {
    pub marking: OmegaMarking,
    pub parent: Option<(usize, TransIdx)>,
}

/// Karp–Miller tree expanding each label once. Every reachable marking is
/// covered by some label, and every label is a limit of reachable markings,
/// so coverability questions are answered exactly. The parent chain of a
/// node spells a firing sequence whose repetitions reach it.
pub fn coverability_tree(net: &PetriNet, budget: usize) -> Result<Vec<CoverNode>, SemanticsError> {
    let root = dense(net, net.initial_marking());
    let mut nodes = vec![CoverNode {
        marking: root.clone(),
        parent: None,
    }];
    let mut seen: HashSet<OmegaMarking> = [root].into();
    let mut work: VecDeque<usize> = [0].into();
    while let Some(i) = work.pop_front() {
        let m = nodes[i].marking.clone();
        for t in net.transition_ids() {
            if !enabled_omega(net, &m, t) {
                continue;
            }
            let mut next = fire_omega(net, &m, t);
            let mut anc = Some(i);
            while let Some(j) = anc {
                let a = &nodes[j].marking;
                if a != &next && covered_by(a, &next) {
                    for (p, slot) in next.iter_mut().enumerate() {
                        if a[p] != *slot {
                            *slot = None;
                        }
                    }
                }
                anc = nodes[j].parent.map(|(k, _)| k);
            }
            if seen.insert(next.clone()) {
                if seen.len() > budget {
                    return Err(SemanticsError::BudgetExceeded(budget));
                }
                nodes.push(CoverNode {
                    marking: next,
                    parent: Some((i, t)),
                });
                work.push_back(nodes.len() - 1);
            }
        }
    }
    Ok(nodes)
}

/// The labels of [`coverability_tree`].
pub fn coverability_set(net: &PetriNet, budget: usize) -> Result<Vec<OmegaMarking>, SemanticsError> {
    Ok(coverability_tree(net, budget)?.into_iter().map(|n| n.marking).collect())
}

/// Distinct transition pairs `(t, u)`, `t < u`, such that some reachable
/// marking covers `•t ∪ •u`.
pub fn coenabled_transitions(net: &PetriNet, budget: usize) -> Result<BTreeSet<(TransIdx, TransIdx)>, SemanticsError> {
    Ok(coenabled_in(net, &coverability_set(net, budget)?))
}

/// Co-enabled pairs read off a coverability set of `net`.
pub fn coenabled_in(net: &PetriNet, cover: &[OmegaMarking]) -> BTreeSet<(TransIdx, TransIdx)> {
    let mut out = BTreeSet::new();
    for m in cover {
        let en: Vec<TransIdx> = net.transition_ids().filter(|t| enabled_omega(net, m, *t)).collect();
        for (i, &t) in en.iter().enumerate() {
            for &u in &en[i + 1..] {
                out.insert((t, u));
            }
        }
    }
    out
}

/// Whether some reachable marking has at least `n` tokens on `p`.
pub fn coverable(net: &PetriNet, p: PlaceIdx, n: u32, budget: usize) -> Result<bool, SemanticsError> {
    Ok(coverability_set(net, budget)?.iter().any(|m| m[p.0].is_none_or(|k| k >= n)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SafetyVerdict {
    Safe,
    /// A reachable marking with two or more tokens on some place.
    Unsafe(Marking),
    /// The state budget ran out first.
    Unknown,
}

/// Breadth-first reachability, stopping at the first marking with more than
/// one token on a place.
pub fn is_safe(net: &PetriNet, budget: usize) -> SafetyVerdict {
    let m0 = net.initial_marking().clone();
    if !m0.is_safe() {
        return SafetyVerdict::Unsafe(m0);
    }
    let mut seen: HashSet<Marking> = [m0.clone()].into();
    let mut queue: VecDeque<Marking> = [m0].into();
    while let Some(m) = queue.pop_front() {
        for t in net.enabled(&m) {
            let next = net.fire(&m, t).expect("enabled");
            if !next.is_safe() {
                return SafetyVerdict::Unsafe(next);
            }
            if seen.insert(next.clone()) {
                if seen.len() > budget {
                    return SafetyVerdict::Unknown;
                }
                queue.push_back(next);
            }
        }
    }
    SafetyVerdict::Safe
}
