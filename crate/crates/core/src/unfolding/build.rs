use std::collections::{BTreeMap, BTreeSet};

use super::cliques::maximal_cliques;
use super::{lpo_of_trace, merge_lpos, EventStructure, UnfoldError};
use crate::ingest::LogFile;
use crate::model::{Action, EventId, EventIdx, EventTable, IndependenceRelation, OccurrenceNet};

/// Canonical position of every non-root event: by causal past size, then
/// label, then the positions of its history.
pub(crate) fn canonical_ranks(es: &EventStructure) -> BTreeMap<EventId, usize> {
    let mut by_size: BTreeMap<usize, Vec<EventId>> = BTreeMap::new();
    for e in es.events().filter(|e| *e != EventTable::ROOT) {
        by_size.entry(es.history(e).len()).or_default().push(e);
    }
    let mut rank = BTreeMap::new();
    for (_, group) in by_size {
        let mut keyed: Vec<((Action, Vec<usize>), EventId)> = group
            .into_iter()
            .map(|e| {
                let mut hist: Vec<usize> = es
                    .history(e)
                    .iter()
                    .filter(|h| **h != EventTable::ROOT)
                    .map(|h| rank[h])
                    .collect();
                hist.sort_unstable();
                ((es.label(e).expect("non-root").clone(), hist), e)
            })
            .collect();
        keyed.sort();
        for (_, e) in keyed {
            let next = rank.len();
            rank.insert(e, next);
        }
    }
    rank
}

/// Direct causal successors of every event, root included.
fn successors(es: &EventStructure) -> BTreeMap<EventId, Vec<EventId>> {
    let mut succ: BTreeMap<EventId, Vec<EventId>> = es.events().map(|e| (e, Vec::new())).collect();
    for f in es.events() {
        let hist = es.history(f);
        for &h in hist {
            let covered = hist.iter().any(|&g| g != h && es.history(g).contains(&h));
            if !covered {
                succ.get_mut(&h).expect("known event").push(f);
            }
        }
    }
    succ
}

/// Turns an event structure into an occurrence net.
///
/// Conditions come from two sources. Each maximal clique `K` (at least two
/// events) of the reduced direct-conflict graph yields `⟨e_K, K⟩` where `e_K`
/// is the canonically greatest maximal event of the common past of `K`. Each
/// event `e` yields `⟨e, K⟩` for every maximal clique `K` of its direct
/// successors under label dependence, or a single `⟨e, ∅⟩` when it has no
/// successors. Duplicate conditions are merged and the root is dropped.
pub fn es_to_occnet(es: &EventStructure, ind: &IndependenceRelation) -> OccurrenceNet {
    let rank = canonical_ranks(es);
    // Root sorts before every other event.
    let key = |e: EventId| rank.get(&e).map_or(0, |r| r + 1);
    let mut conditions: BTreeSet<(Option<usize>, Vec<usize>)> = BTreeSet::new();
    let mut add = |generator: EventId, consumers: Vec<EventId>| {
        let mut cons: Vec<usize> = consumers.iter().map(|c| rank[c]).collect();
        cons.sort_unstable();
        conditions.insert((rank.get(&generator).copied(), cons));
    };

    // conflict cliques
    let conflicted: Vec<EventId> = es
        .direct_conflicts()
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let pos: BTreeMap<EventId, usize> = conflicted.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut adj = vec![BTreeSet::new(); conflicted.len()];
    for &(a, b) in es.direct_conflicts() {
        adj[pos[&a]].insert(pos[&b]);
        adj[pos[&b]].insert(pos[&a]);
    }
    for clique in maximal_cliques(&adj) {
        if clique.len() < 2 {
            continue;
        }
        let members: Vec<EventId> = clique.iter().map(|&i| conflicted[i]).collect();
        let mut common = es.causal_past(members[0]);
        for &m in &members[1..] {
            let p = es.causal_past(m);
            common.retain(|x| p.contains(x));
        }
        let generator = common
            .iter()
            .copied()
            .filter(|&x| !common.iter().any(|&y| y != x && es.leq(x, y)))
            .max_by_key(|&x| key(x))
            .expect("common past contains the root");
        add(generator, members);
    }

    // successor cliques
    for (e, succ) in successors(es) {
        if succ.is_empty() {
            add(e, Vec::new());
            continue;
        }
        let mut adj = vec![BTreeSet::new(); succ.len()];
        for i in 0..succ.len() {
            for j in i + 1..succ.len() {
                if ind.labels_dependent(es.label(succ[i]), es.label(succ[j])) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        for clique in maximal_cliques(&adj) {
            add(e, clique.iter().map(|&i| succ[i]).collect());
        }
    }

    let mut labels = vec![None; rank.len()];
    for (e, r) in &rank {
        labels[*r] = es.label(*e).cloned();
    }
    let labels = labels.into_iter().map(|l| l.expect("every rank filled")).collect();
    let conds = conditions
        .into_iter()
        .map(|(g, cons)| (g.map(EventIdx), cons.into_iter().map(EventIdx).collect()))
        .collect();
    OccurrenceNet::from_parts(labels, conds).expect("unfolding is acyclic")
}

/// Builds lpos, event structure and occurrence net for the distinct traces
/// of `log`. Returns the table and event structure alongside the net.
pub fn unfold_log(log: &LogFile, ind: &IndependenceRelation) -> Result<(EventTable, EventStructure, OccurrenceNet), UnfoldError> {
    let mut table = EventTable::new();
    let lpos = log
        .distinct()
        .iter()
        .map(|t| lpo_of_trace(&mut table, t, ind))
        .collect::<Result<Vec<_>, _>>()?;
    let es = merge_lpos(&table, &lpos, ind);
    let net = es_to_occnet(&es, ind);
    Ok((table, es, net))
}

pub fn build_unfolding(log: &LogFile, ind: &IndependenceRelation) -> Result<OccurrenceNet, UnfoldError> {
    unfold_log(log, ind).map(|(_, _, net)| net)
}
