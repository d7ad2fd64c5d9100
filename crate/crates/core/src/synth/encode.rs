use std::collections::{BTreeMap, BTreeSet};

use super::system::{Clause, ConstraintSystem, Formulas, Var, VarKind};
use super::SynthError;
use crate::folding::IpScope;
use crate::model::{Action, CondIdx, EventIdx, IndependenceRelation, OccurrenceNet};
use crate::semantics::{coenabled_events, structural_relations, Node};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FoldClass {
    #[default]
    Sp,
    Ip,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EncodeOptions {
    pub class: FoldClass,
    pub ra: bool,
    pub ip_scope: IpScope,
    /// Upper bound on the number of transitions.
    pub k: Option<usize>,
    pub min_places: Option<usize>,
    pub max_places: Option<usize>,
    pub label_merge: bool,
}

/// Builds the constraint system for folding `star` (the unfolding with
/// negative events pruned) inside `full`.
///
/// Under `IpScope::Coe` the pairs co-enabled in `star` are encoded; pairs
/// that only become co-enabled after folding are left to a check on complete
/// assignments.
pub fn encode(
    full: &OccurrenceNet,
    star: &OccurrenceNet,
    ind: &IndependenceRelation,
    neg_events: &BTreeSet<EventIdx>,
    opts: &EncodeOptions,
) -> Result<ConstraintSystem, SynthError> {
    let events: Vec<EventIdx> = star.event_ids().collect();
    let mut conds: BTreeSet<CondIdx> = star.condition_ids().collect();
    let star_conds: Vec<CondIdx> = conds.iter().copied().collect();
    if opts.ra {
        for &n in neg_events {
            conds.extend(full.event(n).preset.iter().copied());
        }
    }
    // initial conditions, then each event followed by the conditions it
    // generates; conditions outside `star` sit next to their generator
    let extra: Vec<CondIdx> = conds.iter().copied().filter(|b| !star.has_condition(*b)).collect();
    let extra_of = |g: Option<EventIdx>| extra.iter().copied().filter(move |&b| full.condition(b).generator == g).map(VarKind::Condition);
    let mut vars: Vec<VarKind> = star.initial_conditions().map(VarKind::Condition).chain(extra_of(None)).collect();
    for &e in &events {
        vars.push(VarKind::Event(e));
        vars.extend(star.event(e).postset.iter().map(|&b| VarKind::Condition(b)));
        vars.extend(extra_of(Some(e)));
    }
    debug_assert_eq!(vars.len(), events.len() + conds.len());
    let mut ev: BTreeMap<EventIdx, Var> = BTreeMap::new();
    let mut cv: BTreeMap<CondIdx, Var> = BTreeMap::new();
    for (i, k) in vars.iter().enumerate() {
        match k {
            VarKind::Event(e) => ev.insert(*e, Var(i)),
            VarKind::Condition(b) => cv.insert(*b, Var(i)),
        };
    }
    let pre = |net: &OccurrenceNet, e: EventIdx| -> Vec<Var> { net.event(e).preset.iter().map(|b| cv[b]).collect() };
    let post = |e: EventIdx| -> Vec<Var> { star.event(e).postset.iter().map(|b| cv[b]).collect() };

    let labels: BTreeSet<&Action> = events.iter().map(|&e| star.label(e)).collect();
    if let Some(k) = opts.k {
        if k < labels.len() {
            return Err(SynthError::InfeasibleBound { k, labels: labels.len() });
        }
    }

    let mut clauses = Vec::new();
    let k = opts.k.unwrap_or(events.len()).min(events.len()).max(1) as u32;
    for &e in &events {
        clauses.push(Clause::Bound(ev[&e], 1, k));
    }
    let nb = conds.len().max(1) as u32;
    for &b in &conds {
        clauses.push(Clause::Bound(cv[&b], 1, nb));
    }

    for (i, &e) in events.iter().enumerate() {
        for &f in &events[i + 1..] {
            if star.label(e) != star.label(f) {
                clauses.push(Clause::Neq(ev[&e], ev[&f]));
            } else {
                let (pe, pf) = (pre(star, e), pre(star, f));
                clauses.push(Clause::Implies {
                    lhs: (ev[&e], ev[&f]),
                    ssc: vec![(pe.clone(), pf.clone()), (pf, pe)],
                });
            }
        }
    }
    if opts.label_merge {
        let mut first: BTreeMap<&Action, EventIdx> = BTreeMap::new();
        for &e in &events {
            match first.get(star.label(e)) {
                Some(&r) => clauses.push(Clause::Eq(ev[&r], ev[&e])),
                None => {
                    first.insert(star.label(e), e);
                }
            }
        }
    }

    let ip = (opts.class == FoldClass::Ip).then_some(opts.ip_scope);
    if let Some(scope) = ip {
        let rel = structural_relations(star);
        for (b, b2) in rel.co_conditions() {
            debug_assert!(rel.co(Node::Cond(b), Node::Cond(b2)));
            clauses.push(Clause::Neq(cv[&b], cv[&b2]));
        }
        let pairs: Vec<(EventIdx, EventIdx)> = match scope {
            IpScope::Coe => coenabled_events(star).into_iter().collect(),
            IpScope::All => events.iter().enumerate().flat_map(|(i, &e)| events[i + 1..].iter().map(move |&f| (e, f))).collect(),
        };
        for (e, f) in pairs {
            let mut disj = Vec::new();
            for (xs, ys) in [(pre(star, e), pre(star, f)), (pre(star, e), post(f)), (post(e), pre(star, f))] {
                for &x in &xs {
                    for &y in &ys {
                        disj.push((x, y));
                    }
                }
            }
            clauses.push(Clause::Iff {
                independent: ind.independent(star.label(e), star.label(f)),
                disj,
            });
        }
    }

    if opts.ra {
        for &n in neg_events {
            let into = pre(full, n);
            for &e in &events {
                if star.label(e) == full.label(n) {
                    clauses.push(Clause::NotSsc { from: pre(star, e), into: into.clone() });
                }
            }
        }
    }

    let place_vars: Vec<Var> = star_conds.iter().map(|b| cv[b]).collect();
    if let Some(p) = opts.min_places {
        clauses.push(Clause::DistinctCountAtLeast { vars: place_vars.clone(), count: p });
    }
    if let Some(p) = opts.max_places {
        clauses.push(Clause::DistinctCountAtMost { vars: place_vars, count: p });
    }

    Ok(ConstraintSystem {
        vars,
        clauses,
        formulas: Formulas {
            sp: true,
            ip,
            ra: opts.ra,
            met: opts.k,
            label_merge: opts.label_merge,
            min_places: opts.min_places,
            max_places: opts.max_places,
        },
    })
}
