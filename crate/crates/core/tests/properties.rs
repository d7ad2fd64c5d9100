//! Randomized invariants over small logs: up to four traces of length at
//! most five over `a`..`d`, with a random independence relation.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use foldmine::folding::{fold, fold_with_maps, is_ip, is_ra, is_sp, IpScope};
use foldmine::ingest::{parse_log, parse_net, serialize_log, serialize_net, LogFile};
use foldmine::metrics::{fitness, independence_ratios, precision_proxy, LabelPair};
use foldmine::model::{
    Action, CondIdx, EventId, EventIdx, EventTable, FoldingEquivalence, IndependenceRelation, Marking, OccurrenceNet, PetriNet, PlaceIdx,
    TransIdx,
};
use foldmine::semantics::{
    check_witness, coenabled_events, coenabled_transitions, lifted_independence, mazurkiewicz_class, natural_independence,
    observations_upto, reachable_markings, replay, structural_relations, Node, ReplayOutcome, DEFAULT_BUDGET,
};
use foldmine::synth::{
    discover, encode, search_max_places, search_min_transitions, solve, DiscoveryOptions, EncodeOptions, FoldClass, Objective,
    PlaceTarget, SearchOptions, SolveConfig, SolveOutcome,
};
use foldmine::unfolding::{build_unfolding, lpo_of_trace, merge_lpos, Lpo};

const LETTERS: [&str; 4] = ["a", "b", "c", "d"];

fn act(s: &str) -> Action {
    Action::new(s).unwrap()
}

fn instance() -> impl Strategy<Value = (LogFile, IndependenceRelation)> {
    let traces = prop::collection::vec(prop::collection::vec(0..4usize, 1..=5), 1..=4);
    (traces, prop::collection::vec(any::<bool>(), 6)).prop_map(|(traces, bits)| {
        let log = LogFile::new(traces.iter().map(|t| t.iter().map(|&i| act(LETTERS[i])).collect()).collect());
        let alphabet = log.alphabet();
        let mut ind = IndependenceRelation::empty(alphabet.clone());
        let mut bit = bits.into_iter();
        for (i, x) in LETTERS.iter().enumerate() {
            for y in &LETTERS[i + 1..] {
                let (a, b) = (act(x), act(y));
                if bit.next().unwrap() && alphabet.contains(&a) && alphabet.contains(&b) {
                    ind.insert(a, b).unwrap();
                }
            }
        }
        (log, ind)
    })
}

/// A random SP equivalence that never merges concurrent conditions. Moves
/// merge two equally labeled events (pairing up their preset conditions at
/// random) or two conditions, and are kept only if the result stays SP.
fn random_sp(net: &OccurrenceNet, choices: &[usize]) -> FoldingEquivalence {
    let rel = structural_relations(net);
    let events: Vec<EventIdx> = net.event_ids().collect();
    let conds: Vec<CondIdx> = net.condition_ids().collect();
    let mut ek: BTreeMap<EventIdx, usize> = events.iter().map(|e| (*e, e.0)).collect();
    let mut ck: BTreeMap<CondIdx, usize> = conds.iter().map(|b| (*b, b.0)).collect();
    let build = |ek: &BTreeMap<EventIdx, usize>, ck: &BTreeMap<CondIdx, usize>| {
        FoldingEquivalence::from_keys(ek.iter().map(|(e, k)| (*e, *k)), ck.iter().map(|(b, k)| (*b, *k)))
    };
    let relabel = |keys: &mut BTreeMap<CondIdx, usize>, from: usize, to: usize| {
        for k in keys.values_mut() {
            if *k == from {
                *k = to;
            }
        }
    };
    let mut pick = choices.iter().copied();
    while let (Some(kind), Some(x), Some(y)) = (pick.next(), pick.next(), pick.next()) {
        let (mut ek2, mut ck2) = (ek.clone(), ck.clone());
        if kind % 2 == 0 {
            let (e, f) = (events[x % events.len()], events[y % events.len()]);
            if net.label(e) != net.label(f) {
                continue;
            }
            let (ke, kf) = (ek2[&e], ek2[&f]);
            for k in ek2.values_mut() {
                if *k == kf {
                    *k = ke;
                }
            }
            let (pe, pf) = (&net.event(e).preset, &net.event(f).preset);
            for (i, b) in pe.iter().enumerate() {
                let b2 = pf[(i + x) % pf.len()];
                let (kb, kb2) = (ck2[b], ck2[&b2]);
                relabel(&mut ck2, kb2, kb);
            }
            for (i, b2) in pf.iter().enumerate() {
                let b = pe[(i + y) % pe.len()];
                let (kb, kb2) = (ck2[&b], ck2[b2]);
                relabel(&mut ck2, kb2, kb);
            }
        } else {
            let (b, b2) = (conds[x % conds.len()], conds[y % conds.len()]);
            let (kb, kb2) = (ck2[&b], ck2[&b2]);
            relabel(&mut ck2, kb2, kb);
        }
        let no_co = conds.iter().all(|&b| conds.iter().all(|&b2| ck2[&b] != ck2[&b2] || !rel.co(Node::Cond(b), Node::Cond(b2))));
        if no_co && is_sp(net, &build(&ek2, &ck2)) {
            (ek, ck) = (ek2, ck2);
        }
    }
    build(&ek, &ck)
}

fn lpos(log: &LogFile, ind: &IndependenceRelation) -> (EventTable, Vec<Lpo>) {
    let mut table = EventTable::new();
    let lpos = log.traces.iter().map(|t| lpo_of_trace(&mut table, t, ind).unwrap()).collect();
    (table, lpos)
}

fn pair<T: Ord + Copy>(x: T, y: T) -> (T, T) {
    (x.min(y), x.max(y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hash_consing_and_causal_closure((log, ind) in instance()) {
        let (table, _) = lpos(&log, &ind);
        let ids: Vec<EventId> = (0..table.len() as u32).map(EventId).collect();
        for &e in &ids {
            for &f in &ids {
                let same = table.label(e) == table.label(f) && table.history(e) == table.history(f);
                prop_assert_eq!(e == f, same);
            }
            for h in table.history(e) {
                prop_assert!(table.history(*h).is_subset(table.history(e)));
            }
        }
    }

    #[test]
    fn conditions_are_identified_by_generator_and_consumers((log, ind) in instance()) {
        let beta = build_unfolding(&log, &ind).unwrap();
        let mut seen = BTreeSet::new();
        for b in beta.condition_ids() {
            let c = beta.condition(b);
            prop_assert!(seen.insert((c.generator, c.consumers.clone())));
        }
    }

    #[test]
    fn marking_add_then_remove_is_identity(tokens in prop::collection::vec(0u32..3, 1..6), p in 0usize..6, n in 1u32..3) {
        let mut m = Marking::new();
        for (i, &t) in tokens.iter().enumerate() {
            m.set(PlaceIdx(i), t);
        }
        let before = m.clone();
        m.add(PlaceIdx(p), n);
        prop_assert!(m.remove(PlaceIdx(p), n));
        prop_assert_eq!(m, before);
    }

    #[test]
    fn text_formats_round_trip((log, ind) in instance()) {
        prop_assert_eq!(parse_log(&serialize_log(&log)).unwrap(), log.clone());
        let net = build_unfolding(&log, &ind).unwrap().to_petri_net().net;
        let text = serialize_net(&net);
        let back = parse_net(&text).unwrap();
        prop_assert_eq!(serialize_net(&back), text);
        prop_assert_eq!(back, net);
    }

    #[test]
    fn lpos_are_configurations_of_the_merge((log, ind) in instance()) {
        let (table, lpos) = lpos(&log, &ind);
        let es = merge_lpos(&table, &lpos, &ind);
        for l in &lpos {
            prop_assert!(es.is_configuration(&l.events));
        }
    }

    #[test]
    fn unfolding_replays_the_log_up_to_commutation((log, ind) in instance()) {
        let net = build_unfolding(&log, &ind).unwrap().to_petri_net().net;
        for sigma in &log.traces {
            for w in mazurkiewicz_class(sigma, &ind, 10_000).unwrap() {
                match replay(&net, &w, DEFAULT_BUDGET).unwrap() {
                    ReplayOutcome::Accept { witness, .. } => prop_assert!(check_witness(&net, &w, &witness)),
                    ReplayOutcome::Reject { .. } => prop_assert!(false, "rejected {:?}", w),
                }
            }
        }
    }

    #[test]
    fn shared_preconditions_match_dependence((log, ind) in instance()) {
        let beta = build_unfolding(&log, &ind).unwrap();
        let rel = structural_relations(&beta);
        for (e, f) in coenabled_events(&beta) {
            let (pe, pf) = (&beta.event(e).preset, &beta.event(f).preset);
            let shared = pe.iter().any(|b| pf.contains(b));
            prop_assert_eq!(shared, ind.dependent(beta.label(e), beta.label(f)));
            for &b in pe {
                for &b2 in pf {
                    prop_assert!(b == b2 || rel.co(Node::Cond(b), Node::Cond(b2)));
                }
            }
        }
    }

    #[test]
    fn lifted_and_natural_independence_agree_on_coenabled_pairs((log, ind) in instance()) {
        let beta = build_unfolding(&log, &ind).unwrap();
        let occ = beta.to_petri_net();
        let lifted = lifted_independence(&occ.net, &ind);
        let natural = natural_independence(&occ.net);
        for (e, f) in coenabled_events(&beta) {
            let p = pair(occ.trans_of[&e], occ.trans_of[&f]);
            prop_assert_eq!(lifted.contains(&p), natural.contains(&p));
        }
    }

    #[test]
    fn unfolding_ignores_trace_order((log, ind) in instance()) {
        let mut rev = log.clone();
        rev.traces.reverse();
        prop_assert_eq!(build_unfolding(&log, &ind).unwrap(), build_unfolding(&rev, &ind).unwrap());
    }

    #[test]
    fn structural_coenabledness_matches_reachability((log, ind) in instance()) {
        let beta = build_unfolding(&log, &ind).unwrap();
        prop_assume!(beta.num_events() <= 10);
        let occ = beta.to_petri_net();
        let mut reach = BTreeSet::new();
        for m in reachable_markings(&occ.net, DEFAULT_BUDGET).unwrap() {
            let en = occ.net.enabled(&m);
            for (i, &t) in en.iter().enumerate() {
                for &u in &en[i + 1..] {
                    reach.insert(pair(occ.events[t.0], occ.events[u.0]));
                }
            }
        }
        prop_assert_eq!(coenabled_events(&beta), reach);
    }

    #[test]
    fn observations_are_prefix_monotone((log, ind) in instance(), k in 1usize..6) {
        let net = build_unfolding(&log, &ind).unwrap().to_petri_net().net;
        let longer = observations_upto(&net, k, DEFAULT_BUDGET).unwrap();
        let shorter = observations_upto(&net, k - 1, DEFAULT_BUDGET).unwrap();
        let cut: BTreeSet<Vec<Action>> = longer.into_iter().filter(|w| w.len() < k).collect();
        prop_assert_eq!(cut, shorter);
    }

    #[test]
    fn commutation_classes_are_equivalence_classes((log, ind) in instance()) {
        let sigma = &log.traces[0];
        let class = mazurkiewicz_class(sigma, &ind, 10_000).unwrap();
        prop_assert!(class.contains(sigma));
        let mut bag = sigma.clone();
        bag.sort();
        for w in &class {
            let mut b = w.clone();
            b.sort();
            prop_assert_eq!(&b, &bag);
            prop_assert!(mazurkiewicz_class(w, &ind, 10_000).unwrap().contains(sigma));
        }
    }

    #[test]
    fn sp_folds_simulate_the_unfolding((log, ind) in instance(), choices in prop::collection::vec(0usize..100, 0..60), walk in prop::collection::vec(0usize..100, 0..12)) {
        let beta = build_unfolding(&log, &ind).unwrap();
        let eq = random_sp(&beta, &choices);
        prop_assert!(is_sp(&beta, &eq));
        let folded = fold_with_maps(&beta, &eq).unwrap();
        prop_assert!(folded.net.num_arcs() <= beta.num_arcs());
        prop_assert_eq!(fitness(&folded.net, &log, DEFAULT_BUDGET).ratio, 1.0);
        // a random run of the unfolding maps to a run of the fold whose
        // markings cover the class images (merged postsets may add tokens)
        let occ = beta.to_petri_net();
        let mut m = occ.net.initial_marking().clone();
        let mut fm = folded.net.initial_marking().clone();
        for c in walk {
            let en = occ.net.enabled(&m);
            if en.is_empty() {
                break;
            }
            let t = en[c % en.len()];
            let u = folded.transition_of[&occ.events[t.0]];
            prop_assert!(folded.net.is_enabled(&fm, u));
            m = occ.net.fire(&m, t).unwrap();
            fm = folded.net.fire(&fm, u).unwrap();
            let mut image = Marking::new();
            for (p, n) in m.iter() {
                image.add(folded.place_of[&occ.conditions[p.0]], n);
            }
            for (p, n) in image.iter() {
                prop_assert!(fm.get(p) >= n);
            }
        }
    }

    #[test]
    fn ratios_swap_with_their_arguments(xs in prop::collection::btree_set((0usize..4, 0usize..4), 0..6), ys in prop::collection::btree_set((0usize..4, 0usize..4), 0..6)) {
        let to = |s: &BTreeSet<(usize, usize)>| -> BTreeSet<LabelPair> {
            s.iter().filter(|(i, j)| i < j).map(|&(i, j)| (act(LETTERS[i]), act(LETTERS[j]))).collect()
        };
        let (a, b) = (to(&xs), to(&ys));
        let (r1, r2) = independence_ratios(&a, &b);
        prop_assert_eq!(independence_ratios(&b, &a), (r2, r1));
    }

    #[test]
    fn more_tokens_never_lower_fitness((log, ind) in instance(), (other, _) in instance(), choices in prop::collection::vec(0usize..100, 0..60)) {
        let beta = build_unfolding(&log, &ind).unwrap();
        let small = fold(&beta, &random_sp(&beta, &choices)).unwrap();
        let mut big = small.clone();
        for p in small.place_ids() {
            let n = small.initial_marking().get(p);
            big.set_initial(p, n + 1);
        }
        prop_assert!(fitness(&small, &other, DEFAULT_BUDGET).ratio <= fitness(&big, &other, DEFAULT_BUDGET).ratio);
    }

    #[test]
    fn sequential_unfolding_is_perfectly_precise((log, _) in instance()) {
        let ind = IndependenceRelation::empty(log.alphabet());
        let net = build_unfolding(&log, &ind).unwrap().to_petri_net().net;
        prop_assert_eq!(precision_proxy(&net, &log, DEFAULT_BUDGET).unwrap(), 1.0);
    }
}

fn merges_concurrent(net: &OccurrenceNet, eq: &FoldingEquivalence) -> bool {
    let rel = structural_relations(net);
    let conds: Vec<CondIdx> = net.condition_ids().collect();
    conds.iter().any(|&b| conds.iter().any(|&b2| eq.condition_class(b) == eq.condition_class(b2) && rel.co(Node::Cond(b), Node::Cond(b2))))
}

fn node_limited(class: FoldClass, ra: bool) -> SearchOptions {
    SearchOptions {
        class,
        ra,
        solver: SolveConfig {
            node_limit: Some(200_000),
            ..SolveConfig::default()
        },
        ..SearchOptions::default()
    }
}

fn transitions_of(net: &PetriNet) -> BTreeSet<TransIdx> {
    net.transition_ids().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn searched_equivalences_have_their_class((log, ind) in instance()) {
        let beta = build_unfolding(&log, &ind).unwrap();
        let none = BTreeSet::new();
        for class in [FoldClass::Sp, FoldClass::Ip] {
            let opts = node_limited(class, false);
            let Ok((eq, k)) = search_min_transitions(&beta, &beta, &ind, &none, &opts) else { continue };
            let net = fold(&beta, &eq).unwrap();
            prop_assert!(net.num_transitions() <= k);
            prop_assert!(is_sp(&beta, &eq));
            if class == FoldClass::Ip || !merges_concurrent(&beta, &eq) {
                prop_assert_eq!(fitness(&net, &log, DEFAULT_BUDGET).ratio, 1.0);
            }
            if class == FoldClass::Ip {
                prop_assert!(is_ip(&beta, &eq, &ind, IpScope::Coe).unwrap());
                // independence is preserved on co-enabled transitions
                let lifted = lifted_independence(&net, &ind);
                let natural = natural_independence(&net);
                for p in coenabled_transitions(&net, DEFAULT_BUDGET).unwrap() {
                    prop_assert_eq!(lifted.contains(&p), natural.contains(&p));
                }
            }
            // same inputs, same answer
            prop_assert_eq!(search_min_transitions(&beta, &beta, &ind, &none, &opts).unwrap(), (eq, k));
        }
    }

    #[test]
    fn sp_satisfiability_is_monotone_in_the_bound((log, ind) in instance()) {
        let beta = build_unfolding(&log, &ind).unwrap();
        let none = BTreeSet::new();
        let labels = log.alphabet().len();
        let mut was_sat = false;
        for k in labels..=beta.num_events() {
            let opts = EncodeOptions { class: FoldClass::Sp, k: Some(k), ..EncodeOptions::default() };
            let cs = encode(&beta, &beta, &ind, &none, &opts).unwrap();
            let sat = matches!(solve(&cs, &SolveConfig::default()), SolveOutcome::Sat(_));
            prop_assert!(sat || !was_sat, "sat below {} but not at it", k);
            was_sat = sat;
        }
        prop_assert!(was_sat);
    }

    #[test]
    fn ra_folds_are_sound((log, ind) in instance(), seed in 0u64..1000) {
        let negatives = foldmine::expgen::random_negatives(&log, &ind, seed, 2);
        prop_assume!(!negatives.is_empty());
        let opts = DiscoveryOptions { search: node_limited(FoldClass::Sp, true), objective: Objective::MinTransitions };
        let Ok(found) = discover(&log, &ind, &negatives, &opts) else { return Ok(()) };
        prop_assert!(is_ra(&found.full, &found.star, &found.equivalence, &found.neg_events));
        prop_assert!(found.net.num_transitions() <= found.star.num_events());
        prop_assert_eq!(fitness(&found.star.to_petri_net().net, &log, DEFAULT_BUDGET).ratio, 1.0);
    }

    #[test]
    fn max_places_is_at_least_min_transitions_places((log, ind) in instance()) {
        let beta = build_unfolding(&log, &ind).unwrap();
        let none = BTreeSet::new();
        let opts = SearchOptions { label_merge: true, ..node_limited(FoldClass::Sp, false) };
        let Ok((eq, p)) = search_max_places(&beta, &beta, &ind, &none, &opts, PlaceTarget::Max) else { return Ok(()) };
        prop_assert_eq!(fold(&beta, &eq).unwrap().num_places(), p);
        prop_assert_eq!(transitions_of(&fold(&beta, &eq).unwrap()).len(), log.alphabet().len());
    }

    #[test]
    fn simulated_traces_replay_on_their_net(seed in 0u64..500) {
        let net = foldmine::expgen::random_block_net(seed, 8);
        let log = foldmine::expgen::simulate_log(&net, 5, 10, seed).unwrap();
        for t in &log.traces {
            prop_assert!(replay(&net, t, DEFAULT_BUDGET).unwrap().accepted());
        }
        prop_assert_eq!(foldmine::expgen::simulate_log(&net, 5, 10, seed).unwrap(), log);
    }
}
