//! Exhaustive enumeration of folding equivalences on small unfoldings.

use std::collections::BTreeSet;

use foldmine::expgen::{random_block_net, reference_independence, simulate_log, to_relation};
use foldmine::folding::{fold, is_ip, is_sp, IpScope};
use foldmine::ingest::LogFile;
use foldmine::model::{CondIdx, EventIdx, FoldingEquivalence, IndependenceRelation, OccurrenceNet};
use foldmine::semantics::{is_safe, SafetyVerdict, DEFAULT_BUDGET};
use foldmine::synth::FoldClass;
use foldmine::unfolding::build_unfolding;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::act;

/// All set partitions of `0..n` as restricted growth strings.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=max + usize::from(i > 0) {
            if i == 0 && v > 0 {
                break;
            }
            cur[i] = v;
            rec(i + 1, max.max(v), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(0, 0, &mut cur, &mut out);
    out
}

pub fn accepts(net: &OccurrenceNet, eq: &FoldingEquivalence, ind: &IndependenceRelation, class: FoldClass) -> bool {
    match class {
        FoldClass::Sp => is_sp(net, eq),
        FoldClass::Ip => {
            is_ip(net, eq, ind, IpScope::Coe).unwrap() && matches!(is_safe(&fold(net, eq).unwrap(), DEFAULT_BUDGET), SafetyVerdict::Safe)
        }
    }
}

/// Least number of event classes over all label-consistent equivalences of
/// the class, or `None`.
pub fn brute_min(net: &OccurrenceNet, ind: &IndependenceRelation, class: FoldClass) -> Option<usize> {
    let events: Vec<EventIdx> = net.event_ids().collect();
    let conds: Vec<CondIdx> = net.condition_ids().collect();
    let cparts = partitions(conds.len());
    let mut best: Option<usize> = None;
    for ep in partitions(events.len()) {
        let consistent = (0..events.len()).all(|i| (0..events.len()).all(|j| ep[i] != ep[j] || net.label(events[i]) == net.label(events[j])));
        let k = ep.iter().max().map_or(0, |m| m + 1);
        if !consistent || best.is_some_and(|b| b <= k) {
            continue;
        }
        let found = cparts.iter().any(|cp| {
            let eq = FoldingEquivalence::from_keys(events.iter().copied().zip(ep.iter().copied()), conds.iter().copied().zip(cp.iter().copied()));
            accepts(net, &eq, ind, class)
        });
        if found {
            best = Some(k);
        }
    }
    best
}

/// Small unfoldings with at least one repeated label: half from sampled
/// block nets, half from random words over three letters.
pub fn instances() -> Vec<(OccurrenceNet, IndependenceRelation)> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let letters = [act("a"), act("b"), act("c")];
    for seed in 0..2000u64 {
        if out.len() >= 60 {
            break;
        }
        let (log, ind) = if seed % 2 == 0 {
            let reference = random_block_net(seed, 5);
            let log = simulate_log(&reference, rng.random_range(1..=4), 5, seed).unwrap();
            let ind = to_relation(&reference_independence(&reference).0, &log.alphabet());
            (log, ind)
        } else {
            let traces = (0..rng.random_range(1..=3))
                .map(|_| (0..rng.random_range(1..=4)).map(|_| letters[rng.random_range(0..3)].clone()).collect())
                .collect();
            let log = LogFile::new(traces);
            let mut ind = IndependenceRelation::empty(letters.iter().cloned().collect());
            for (x, y) in [(0, 1), (0, 2), (1, 2)] {
                if rng.random_bool(0.3) {
                    ind.insert(letters[x].clone(), letters[y].clone()).unwrap();
                }
            }
            (log, ind)
        };
        let net = build_unfolding(&log, &ind).unwrap();
        let labels: BTreeSet<_> = net.event_ids().map(|e| net.label(e).clone()).collect();
        if net.num_events() <= 6 && net.num_conditions() <= 9 && labels.len() < net.num_events() {
            out.push((net, ind));
        }
    }
    out
}
