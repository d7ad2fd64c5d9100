use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::SemanticsError;
use crate::model::{Action, Marking, PetriNet, TransIdx};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayOutcome {
    /// Some firing sequence spells the word. `witness` is one such sequence.
    Accept { marking: Marking, witness: Vec<TransIdx> },
    /// No firing sequence spells the word; `failure_index` is the length of
    /// the longest prefix that can be replayed.
    Reject { failure_index: usize },
}

impl ReplayOutcome {
    pub fn accepted(&self) -> bool {
        matches!(self, ReplayOutcome::Accept { .. })
    }
}

pub fn enabled(net: &PetriNet, m: &Marking) -> Vec<TransIdx> {
    net.enabled(m)
}

pub fn fire(net: &PetriNet, m: &Marking, t: TransIdx) -> Result<Marking, SemanticsError> {
    Ok(net.fire(m, t)?)
}

pub(crate) fn by_label(net: &PetriNet) -> HashMap<&Action, Vec<TransIdx>> {
    let mut map: HashMap<&Action, Vec<TransIdx>> = HashMap::new();
    for t in net.transition_ids() {
        map.entry(net.label(t)).or_default().push(t);
    }
    map
}

/// Existential replay by depth-first search over `(position, marking)` with
/// memoization. `budget` bounds the number of distinct states visited.
pub fn replay(net: &PetriNet, word: &[Action], budget: usize) -> Result<ReplayOutcome, SemanticsError> {
    replay_from(net, net.initial_marking(), word, budget)
}

pub fn replay_from(net: &PetriNet, start: &Marking, word: &[Action], budget: usize) -> Result<ReplayOutcome, SemanticsError> {
    let labels = by_label(net);
    let mut visited: HashSet<(usize, Marking)> = HashSet::new();
    let mut path: Vec<TransIdx> = Vec::new();
    let mut best = 0;
    // each frame: marking, position, remaining candidate transitions
    let mut stack: Vec<(Marking, usize, Vec<TransIdx>)> = Vec::new();
    let candidates = |pos: usize, m: &Marking| -> Vec<TransIdx> {
        match word.get(pos).and_then(|a| labels.get(a)) {
            Some(ts) => ts.iter().rev().copied().filter(|t| net.is_enabled(m, *t)).collect(),
            None => Vec::new(),
        }
    };
    visited.insert((0, start.clone()));
    if word.is_empty() {
        return Ok(ReplayOutcome::Accept {
            marking: start.clone(),
            witness: Vec::new(),
        });
    }
    stack.push((start.clone(), 0, candidates(0, start)));
    while let Some((m, pos, cands)) = stack.last_mut() {
        let Some(t) = cands.pop() else {
            stack.pop();
            path.pop();
            continue;
        };
        let next = net.fire(m, t)?;
        let npos = *pos + 1;
        if !visited.insert((npos, next.clone())) {
            continue;
        }
        if visited.len() > budget {
            return Err(SemanticsError::BudgetExceeded(budget));
        }
        path.push(t);
        best = best.max(npos);
        if npos == word.len() {
            return Ok(ReplayOutcome::Accept {
                marking: next,
                witness: path,
            });
        }
        let c = candidates(npos, &next);
        stack.push((next, npos, c));
    }
    Ok(ReplayOutcome::Reject { failure_index: best })
}

/// Checks that `witness` is fireable from the initial marking and spells
/// `word`.
pub fn check_witness(net: &PetriNet, word: &[Action], witness: &[TransIdx]) -> bool {
    if word.len() != witness.len() {
        return false;
    }
    let mut m = net.initial_marking().clone();
    for (a, &t) in word.iter().zip(witness) {
        if net.label(t) != a {
            return false;
        }
        match net.fire(&m, t) {
            Ok(n) => m = n,
            Err(_) => return false,
        }
    }
    true
}

/// All words of length at most `k` spelled by fireable sequences.
pub fn observations_upto(net: &PetriNet, k: usize, budget: usize) -> Result<BTreeSet<Vec<Action>>, SemanticsError> {
    let mut words = BTreeSet::new();
    let mut level: BTreeMap<Vec<Action>, BTreeSet<Marking>> = BTreeMap::new();
    level.insert(Vec::new(), [net.initial_marking().clone()].into());
    words.insert(Vec::new());
    let mut states = 1usize;
    for _ in 0..k {
        let mut next: BTreeMap<Vec<Action>, BTreeSet<Marking>> = BTreeMap::new();
        for (w, ms) in &level {
            for m in ms {
                for t in net.enabled(m) {
                    let mut w2 = w.clone();
                    w2.push(net.label(t).clone());
                    if next.entry(w2).or_default().insert(net.fire(m, t)?) {
                        states += 1;
                        if states > budget {
                            return Err(SemanticsError::BudgetExceeded(budget));
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        words.extend(next.keys().cloned());
        level = next;
    }
    Ok(words)
}

/// Every marking reachable from the initial one, by breadth-first search.
pub fn reachable_markings(net: &PetriNet, budget: usize) -> Result<Vec<Marking>, SemanticsError> {
    let mut seen: HashSet<Marking> = HashSet::new();
    let mut order = vec![net.initial_marking().clone()];
    seen.insert(net.initial_marking().clone());
    let mut i = 0;
    while i < order.len() {
        let m = order[i].clone();
        i += 1;
        for t in net.enabled(&m) {
            let n = net.fire(&m, t)?;
            if seen.insert(n.clone()) {
                if seen.len() > budget {
                    return Err(SemanticsError::BudgetExceeded(budget));
                }
                order.push(n);
            }
        }
    }
    Ok(order)
}
