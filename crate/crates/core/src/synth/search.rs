use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Instant;

use super::encode::{encode, EncodeOptions, FoldClass};
use super::solver::{solve_with_oracle, Oracle, SolveConfig, SolveOutcome, Verdict};
use super::system::{Assignment, ConstraintSystem, Var, VarKind};
use super::SynthError;
use crate::folding::{fold, is_ip, IpScope};
use crate::ingest::LogFile;
use crate::model::{Action, CondIdx, EventIdx, FoldingEquivalence, IndependenceRelation, OccurrenceNet, PetriNet, PlaceIdx, TransIdx};
use crate::semantics::{coverability_tree, is_safe, CoverNode, OmegaMarking, SafetyVerdict, DEFAULT_BUDGET};
use crate::unfolding::{build_unfolding, causal_successors, locate_negative_event, prune_negatives};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Transitions,
    Places,
    Nodes,
}

pub fn simplicity(net: &PetriNet, measure: Measure) -> usize {
    match measure {
        Measure::Transitions => net.num_transitions(),
        Measure::Places => net.num_places(),
        Measure::Nodes => net.num_transitions() + net.num_places(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    pub class: FoldClass,
    pub ra: bool,
    pub ip_scope: IpScope,
    pub label_merge: bool,
    /// For IP, also require the folded net to be safe.
    pub require_safe: bool,
    /// Transition bound used by the place searches when labels are not merged.
    pub k: Option<usize>,
    pub solver: SolveConfig,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            class: FoldClass::Sp,
            ra: false,
            ip_scope: IpScope::Coe,
            label_merge: false,
            require_safe: true,
            k: None,
            solver: SolveConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlaceTarget {
    Max,
    /// Exactly `⌈fraction × |B|⌉` places.
    Fraction(f64),
}

/// The equivalence induced by equal values. Nodes outside the system are
/// left out.
pub fn decode(cs: &ConstraintSystem, a: &Assignment) -> FoldingEquivalence {
    let mut events = Vec::new();
    let mut conds = Vec::new();
    for (kind, &v) in cs.vars.iter().zip(&a.values) {
        match kind {
            VarKind::Event(e) => events.push((*e, v)),
            VarKind::Condition(b) => conds.push((*b, v)),
        }
    }
    FoldingEquivalence::from_keys(events, conds)
}

struct Problem<'a> {
    full: &'a OccurrenceNet,
    star: &'a OccurrenceNet,
    ind: &'a IndependenceRelation,
    neg: &'a BTreeSet<EventIdx>,
    opts: &'a SearchOptions,
    /// End of the time budget, shared by all probes.
    deadline: Option<Instant>,
}

impl<'a> Problem<'a> {
    fn new(
        full: &'a OccurrenceNet,
        star: &'a OccurrenceNet,
        ind: &'a IndependenceRelation,
        neg: &'a BTreeSet<EventIdx>,
        opts: &'a SearchOptions,
    ) -> Self {
        Problem {
            full,
            star,
            ind,
            neg,
            opts,
            deadline: opts.solver.time_budget.map(|b| Instant::now() + b),
        }
    }

    fn encode_options(&self, k: Option<usize>, min_places: Option<usize>, max_places: Option<usize>) -> EncodeOptions {
        EncodeOptions {
            class: self.opts.class,
            ra: self.opts.ra,
            ip_scope: self.opts.ip_scope,
            k,
            min_places,
            max_places,
            label_merge: self.opts.label_merge,
        }
    }

    /// Checks the parts of the class that the encoding leaves to complete
    /// assignments.
    fn verify(&self, eq: &FoldingEquivalence) -> Verdict {
        if self.opts.class != FoldClass::Ip {
            return Verdict::Accept;
        }
        match is_ip(self.star, eq, self.ind, self.opts.ip_scope) {
            Ok(true) => {}
            Ok(false) => return Verdict::Reject,
            Err(_) => return Verdict::Unknown,
        }
        if self.opts.require_safe {
            let Ok(net) = fold(self.star, eq) else {
                return Verdict::Reject;
            };
            match is_safe(&net, DEFAULT_BUDGET) {
                SafetyVerdict::Safe => {}
                SafetyVerdict::Unsafe(_) => return Verdict::Reject,
                SafetyVerdict::Unknown => return Verdict::Unknown,
            }
        }
        Verdict::Accept
    }

    fn attempt(&self, eo: &EncodeOptions) -> Result<Option<(FoldingEquivalence, ConstraintSystem)>, SynthError> {
        self.attempt_with(eo, &self.opts.solver)
    }

    fn attempt_with(&self, eo: &EncodeOptions, config: &SolveConfig) -> Result<Option<(FoldingEquivalence, ConstraintSystem)>, SynthError> {
        let cs = encode(self.full, self.star, self.ind, self.neg, eo)?;
        let mut config = config.clone();
        if let Some(d) = self.deadline {
            let left = d.saturating_duration_since(Instant::now());
            if left.is_zero() {
                return Err(SynthError::Timeout);
            }
            config.time_budget = Some(left);
        }
        let config = &config;
        let mut oracle = PrefixOracle::new(self, &cs);
        let (outcome, _) = solve_with_oracle(&cs, config, &mut oracle);
        match outcome {
            SolveOutcome::Sat(a) => Ok(Some((decode(&cs, &a), cs))),
            SolveOutcome::Unsat => Ok(None),
            SolveOutcome::Timeout => Err(SynthError::Timeout),
        }
    }

    fn label_count(&self) -> usize {
        self.star.event_ids().map(|e| self.star.label(e)).collect::<BTreeSet<&Action>>().len()
    }

    /// Gallops up from `|A|` until satisfiable, then bisects the last gap.
    /// Small bounds are cheap because labels then pin most event classes,
    /// while large ones leave the search many merges to try.
    fn min_transitions(&self) -> Result<(FoldingEquivalence, usize, ConstraintSystem), SynthError> {
        let lo = self.label_count();
        let top = self.star.num_events().max(lo);
        let mut unsat_below = lo;
        let mut k = lo;
        let mut step = 1;
        let (mut best, mut best_cs) = loop {
            if let Some(found) = self.attempt(&self.encode_options(Some(k), None, None))? {
                break found;
            }
            if k == top {
                return Err(SynthError::UnsatAll);
            }
            unsat_below = k + 1;
            k = (k + step).min(top);
            step *= 2;
        };
        let mut hi = k;
        while unsat_below < hi {
            let mid = (unsat_below + hi) / 2;
            match self.attempt(&self.encode_options(Some(mid), None, None))? {
                Some((eq, cs)) => {
                    hi = mid;
                    best = eq;
                    best_cs = cs;
                }
                None => unsat_below = mid + 1,
            }
        }
        Ok((best, hi, best_cs))
    }

    /// With `refine_nodes` set, probes above the first solution get that
    /// node limit and one that runs out counts as unsatisfiable, so the
    /// result may fall short of the maximum but stays deterministic.
    fn max_places(
        &self,
        k: Option<usize>,
        target: PlaceTarget,
        refine_nodes: Option<u64>,
        base: Option<(FoldingEquivalence, ConstraintSystem)>,
    ) -> Result<(FoldingEquivalence, usize, ConstraintSystem), SynthError> {
        let total = self.star.num_conditions();
        if let PlaceTarget::Fraction(f) = target {
            if !(f > 0.0 && f <= 1.0) {
                return Err(SynthError::BadFraction(f.to_string()));
            }
            let p = ((f * total as f64).ceil() as usize).max(1).min(total);
            let (eq, cs) = self.attempt(&self.encode_options(k, Some(p), Some(p)))?.ok_or(SynthError::UnsatAll)?;
            return Ok((eq, p, cs));
        }
        let (mut best, mut best_cs) = match base {
            Some(b) => b,
            None => self.attempt(&self.encode_options(k, None, None))?.ok_or(SynthError::UnsatAll)?,
        };
        let places = |eq: &FoldingEquivalence| eq.normalized_for(self.star).num_condition_classes();
        let mut lo = places(&best);
        // the bound `best` was found under; the answer is lex-least under `lo`
        let mut best_at = 0;
        let mut hi = total;
        let mut config = self.opts.solver.clone();
        if refine_nodes.is_some() {
            config.node_limit = refine_nodes;
        }
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            match self.attempt_with(&self.encode_options(k, Some(mid), None), &config) {
                Ok(Some((eq, cs))) => {
                    lo = places(&eq);
                    best = eq;
                    best_cs = cs;
                    best_at = mid;
                }
                Ok(None) => hi = mid - 1,
                Err(SynthError::Timeout) if refine_nodes.is_some() => hi = mid - 1,
                Err(e) => return Err(e),
            }
        }
        if best_at > 0 && best_at < lo {
            match self.attempt_with(&self.encode_options(k, Some(lo), None), &config) {
                Ok(Some((eq, cs))) => {
                    best = eq;
                    best_cs = cs;
                }
                Ok(None) => unreachable!("a solution with {lo} places is known"),
                Err(SynthError::Timeout) if refine_nodes.is_some() => {}
                Err(e) => return Err(e),
            }
        }
        Ok((best, lo, best_cs))
    }
}

/// Node limit for each probe of the places refinement after
/// min-transitions.
const REFINE_NODES: u64 = 50_000;

/// Bound on remembered consistent prefixes.
const PASSED_CAP: usize = 1 << 18;

/// State budget for checks on partial assignments. Running out only skips
/// the check.
const PARTIAL_BUDGET: usize = 20_000;

/// Checks IP on the part of the net whose variables are all assigned.
///
/// Folding that part yields a net whose firing sequences all remain
/// fireable, with at least as many tokens, once the rest is assigned: later
/// conditions only add initial tokens, later events either form new
/// transitions or (being SP) add output places to existing ones. So
/// co-enabled pairs and unsafe markings found here persist.
struct PrefixOracle<'p, 'a> {
    problem: &'p Problem<'a>,
    cs: &'p ConstraintSystem,
    event_var: BTreeMap<EventIdx, usize>,
    cond_var: BTreeMap<CondIdx, usize>,
    /// Events whose variables are all assigned once variable `i` is.
    completes_at: Vec<bool>,
    /// Events in order of their last variable.
    order: Vec<(usize, EventIdx)>,
    /// Prefixes already found consistent, by [`PrefixKey`].
    passed: HashSet<PrefixKey>,
}

/// What a prefix check depends on: the initial marking by class and, for
/// each completed event, its transition with the classes around it.
#[derive(Clone, PartialEq, Eq, Hash)]
struct PrefixKey {
    initial: Vec<u32>,
    images: BTreeSet<(u32, Vec<u32>, Vec<u32>)>,
}

impl<'p, 'a> PrefixOracle<'p, 'a> {
    fn new(problem: &'p Problem<'a>, cs: &'p ConstraintSystem) -> Self {
        let mut event_var = BTreeMap::new();
        let mut cond_var = BTreeMap::new();
        for (i, k) in cs.vars.iter().enumerate() {
            match k {
                VarKind::Event(e) => {
                    event_var.insert(*e, i);
                }
                VarKind::Condition(b) => {
                    cond_var.insert(*b, i);
                }
            }
        }
        let star = problem.star;
        let mut order: Vec<(usize, EventIdx)> = star
            .event_ids()
            .map(|e| {
                let ev = star.event(e);
                let last = ev.preset.iter().chain(&ev.postset).map(|b| cond_var[b]).chain([event_var[&e]]).max().expect("event var");
                (last, e)
            })
            .collect();
        order.sort();
        let mut completes_at = vec![false; cs.num_vars()];
        for &(i, _) in &order {
            completes_at[i] = true;
        }
        PrefixOracle {
            problem,
            cs,
            event_var,
            cond_var,
            completes_at,
            order,
            passed: HashSet::new(),
        }
    }

    fn key(&self, vals: &[Option<u32>], upto: usize) -> PrefixKey {
        let star = self.problem.star;
        let class = |b: &CondIdx| vals[self.cond_var[b]].expect("assigned");
        let mut initial: Vec<u32> = star.initial_conditions().filter_map(|b| vals[self.cond_var[&b]]).collect();
        initial.sort_unstable();
        let images = self
            .order
            .iter()
            .take_while(|(i, _)| *i <= upto)
            .map(|&(_, e)| {
                let ev = star.event(e);
                let mut pre: Vec<u32> = ev.preset.iter().map(class).collect();
                let mut post: Vec<u32> = ev.postset.iter().map(class).collect();
                pre.sort_unstable();
                pre.dedup();
                post.sort_unstable();
                post.dedup();
                (vals[self.event_var[&e]].expect("assigned"), pre, post)
            })
            .collect();
        PrefixKey { initial, images }
    }

    /// Folds the events whose variables are all assigned. On failure,
    /// returns the variables of the events and conditions behind the
    /// offending run, plus the assigned initial conditions.
    fn check_prefix(&self, vals: &[Option<u32>], upto: usize) -> Result<(), Vec<Var>> {
        let star = self.problem.star;
        let events: Vec<EventIdx> = self.order.iter().take_while(|(i, _)| *i <= upto).map(|(_, e)| *e).collect();
        let mut net = PetriNet::new("prefix");
        let mut places: BTreeMap<u32, PlaceIdx> = BTreeMap::new();
        let mut place = |net: &mut PetriNet, b: CondIdx| -> PlaceIdx {
            let v = vals[self.cond_var[&b]].expect("assigned");
            *places.entry(v).or_insert_with(|| net.add_place(format!("p{v}"), 0))
        };
        let initial: Vec<CondIdx> = star.initial_conditions().filter(|b| vals[self.cond_var[b]].is_some()).collect();
        for &b in &initial {
            let p = place(&mut net, b);
            let n = net.initial_marking().get(p);
            net.set_initial(p, n + 1);
        }
        let mut transitions: BTreeMap<u32, TransIdx> = BTreeMap::new();
        let mut image = BTreeMap::new();
        for &e in &events {
            let v = vals[self.event_var[&e]].expect("assigned");
            let t = *transitions
                .entry(v)
                .or_insert_with(|| net.add_transition(format!("t{v}"), star.label(e).clone()));
            image.insert(e, t);
            for &b in &star.event(e).preset {
                let p = place(&mut net, b);
                net.add_input_arc(p, t);
            }
            for &b in &star.event(e).postset {
                let p = place(&mut net, b);
                net.add_output_arc(t, p);
            }
        }
        // Completions only add tokens, transitions and output arcs, and SP
        // keeps every preset as it is, so the run survives if we keep one
        // event per fired transition for its preset, one per output arc, and
        // the offending pair.
        let explain = |node: Option<usize>, pair: Option<(EventIdx, EventIdx)>, tree: &[CoverNode]| -> Vec<Var> {
            let mut fired = BTreeSet::new();
            let mut cur = node;
            while let Some((parent, t)) = cur.and_then(|k| tree[k].parent) {
                fired.insert(t);
                cur = Some(parent);
            }
            let cv = |b: &CondIdx| Var(self.cond_var[b]);
            let mut out: Vec<Var> = initial.iter().map(cv).collect();
            let mut with_pre = BTreeSet::new();
            let mut with_post = BTreeSet::new();
            for &e in &events {
                let t = image[&e];
                if !fired.contains(&t) {
                    continue;
                }
                let ev = star.event(e);
                if with_pre.insert(t) {
                    out.push(Var(self.event_var[&e]));
                    out.extend(ev.preset.iter().map(cv));
                }
                for b in &ev.postset {
                    if with_post.insert((t, vals[self.cond_var[b]])) {
                        out.push(Var(self.event_var[&e]));
                        out.push(cv(b));
                    }
                }
            }
            for e in pair.into_iter().flat_map(|(e, f)| [e, f]) {
                let ev = star.event(e);
                out.push(Var(self.event_var[&e]));
                out.extend(ev.preset.iter().chain(&ev.postset).map(cv));
            }
            out
        };
        let Ok(tree) = coverability_tree(&net, PARTIAL_BUDGET) else {
            return Ok(());
        };
        if self.problem.opts.require_safe {
            if let Some(k) = tree.iter().position(|n| n.marking.iter().any(|c| c.is_none_or(|n| n >= 2))) {
                return Err(explain(Some(k), None, &tree));
            }
        }
        let classes = |bs: &[CondIdx]| -> BTreeSet<u32> { bs.iter().map(|b| vals[self.cond_var[b]].expect("assigned")).collect() };
        let mut bad: BTreeMap<(TransIdx, TransIdx), (EventIdx, EventIdx)> = BTreeMap::new();
        for (i, &e) in events.iter().enumerate() {
            for &f in &events[i + 1..] {
                let (t, u) = (image[&e], image[&f]);
                if t == u {
                    continue;
                }
                let (pe, qe) = (classes(&star.event(e).preset), classes(&star.event(e).postset));
                let (pf, qf) = (classes(&star.event(f).preset), classes(&star.event(f).postset));
                let touching = !pe.is_disjoint(&pf) || !pe.is_disjoint(&qf) || !qe.is_disjoint(&pf);
                if touching == self.problem.ind.independent(star.label(e), star.label(f)) {
                    if self.problem.opts.ip_scope == IpScope::All {
                        return Err(explain(None, Some((e, f)), &tree));
                    }
                    bad.entry((t.min(u), t.max(u))).or_insert((e, f));
                }
            }
        }
        if bad.is_empty() {
            return Ok(());
        }
        let enabled = |m: &OmegaMarking, t: TransIdx| net.transition(t).preset.iter().all(|p| m[p.0] != Some(0));
        for (k, node) in tree.iter().enumerate() {
            for (&(t, u), &pair) in &bad {
                if enabled(&node.marking, t) && enabled(&node.marking, u) {
                    return Err(explain(Some(k), Some(pair), &tree));
                }
            }
        }
        Ok(())
    }
}

impl Oracle for PrefixOracle<'_, '_> {
    fn partial(&mut self, vals: &[Option<u32>], var: Var) -> Result<(), Vec<Var>> {
        if self.problem.opts.class != FoldClass::Ip || !self.completes_at[var.0] {
            return Ok(());
        }
        let key = self.key(vals, var.0);
        if self.passed.contains(&key) {
            return Ok(());
        }
        let r = self.check_prefix(vals, var.0);
        if r.is_ok() && self.passed.len() < PASSED_CAP {
            self.passed.insert(key);
        }
        r
    }

    fn complete(&mut self, a: &Assignment) -> Verdict {
        self.problem.verify(&decode(self.cs, a))
    }
}

/// Least transition bound `k` in `[|A|, |E|]` for which an equivalence of the
/// requested class exists, with the lexicographically least one at that `k`.
pub fn search_min_transitions(
    full: &OccurrenceNet,
    star: &OccurrenceNet,
    ind: &IndependenceRelation,
    neg: &BTreeSet<EventIdx>,
    opts: &SearchOptions,
) -> Result<(FoldingEquivalence, usize), SynthError> {
    let problem = Problem::new(full, star, ind, neg, opts);
    problem.min_transitions().map(|(eq, k, _)| (eq, k))
}

/// Largest number of condition classes reachable with events merged by label
/// (or bounded by `opts.k`), or exactly the requested fraction of `|B|`.
pub fn search_max_places(
    full: &OccurrenceNet,
    star: &OccurrenceNet,
    ind: &IndependenceRelation,
    neg: &BTreeSet<EventIdx>,
    opts: &SearchOptions,
    target: PlaceTarget,
) -> Result<(FoldingEquivalence, usize), SynthError> {
    let problem = Problem::new(full, star, ind, neg, opts);
    problem.max_places(opts.k, target, None, None).map(|(eq, p, _)| (eq, p))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    /// Fewest transitions, then most places at that bound.
    MinTransitions,
    Places(PlaceTarget),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscoveryOptions {
    pub search: SearchOptions,
    pub objective: Objective,
}

impl Default for DiscoveryOptions {
    fn default() -> Self {
        DiscoveryOptions {
            search: SearchOptions::default(),
            objective: Objective::MinTransitions,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiscoveryResult {
    /// Unfolding of positive and negative traces.
    pub full: OccurrenceNet,
    /// `full` with negative events removed.
    pub star: OccurrenceNet,
    pub neg_events: BTreeSet<EventIdx>,
    /// Events removed only because they lie above a negative event.
    pub extra_removed: BTreeSet<EventIdx>,
    pub equivalence: FoldingEquivalence,
    pub net: PetriNet,
    /// The system whose solution was returned.
    pub system: ConstraintSystem,
}

/// Unfolds, prunes negatives, searches and folds.
pub fn discover(log: &LogFile, ind: &IndependenceRelation, negatives: &LogFile, opts: &DiscoveryOptions) -> Result<DiscoveryResult, SynthError> {
    let ind = ind.with_alphabet(&log.alphabet().union(&negatives.alphabet()));
    let mut all = log.clone();
    all.traces.extend(negatives.traces.iter().cloned());
    let full = build_unfolding(&all, &ind)?;
    let mut neg_events = BTreeSet::new();
    for sigma in &negatives.traces {
        neg_events.insert(locate_negative_event(&full, sigma, &ind)?);
    }
    let extra_removed = causal_successors(&full, &neg_events);
    let star = prune_negatives(&full, &neg_events);
    let problem = Problem::new(&full, &star, &ind, &neg_events, &opts.search);
    let (equivalence, _, system) = match opts.objective {
        Objective::MinTransitions => {
            let (eq, k, cs) = problem.min_transitions()?;
            problem.max_places(Some(k), PlaceTarget::Max, Some(REFINE_NODES), Some((eq, cs)))?
        }
        Objective::Places(target) => problem.max_places(opts.search.k, target, None, None)?,
    };
    let net = fold(&star, &equivalence)?;
    Ok(DiscoveryResult {
        full,
        star,
        neg_events,
        extra_removed,
        equivalence,
        net,
        system,
    })
}
