//! Backtracking search over the variables in canonical order.
//!
//! Values are tried in ascending order and a variable may only take a value
//! one above the largest value used by earlier variables of its kind, so the
//! first solution found is the lexicographically least one. Equality clauses
//! are kept as disjunctions of `x = y` / `x ≠ y` literals and propagate to
//! later variables as soon as a single literal is left open. Dead ends jump
//! back to the most recent variable involved in the failure.

use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;

use super::system::{eval, Assignment, Clause, ConstraintSystem, Tri, Var, VarKind};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveConfig {
    /// Accepted for interface stability; the search is deterministic and
    /// does not consult it.
    pub seed: u64,
    pub time_budget: Option<Duration>,
    /// Give up (as a timeout) after this many search nodes. Unlike the time
    /// budget, the outcome does not depend on the machine.
    pub node_limit: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Assignment),
    Unsat,
    Timeout,
}

/// Verdict of an external check on a complete assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
    /// The check could not decide; the search continues but can no longer
    /// report `Unsat`.
    Unknown,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub backjumps: u64,
    pub checks: u64,
    pub rejected: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Lit {
    a: usize,
    b: usize,
    eq: bool,
}

enum Prune {
    Force(u32),
    Forbid(u32),
}

struct PruneEntry {
    prune: Prune,
    reason: Vec<usize>,
}

struct Solver<'a> {
    n: usize,
    lo: Vec<u32>,
    hi: Vec<u32>,
    /// Whether each variable is an event variable.
    is_event: Vec<bool>,
    cnf: Vec<Vec<Lit>>,
    cnf_of: Vec<Vec<usize>>,
    special: Vec<&'a Clause>,
    special_vars: Vec<Vec<usize>>,
    special_of: Vec<Vec<usize>>,
    vals: Vec<Option<u32>>,
    prunes: Vec<Vec<PruneEntry>>,
    trail: Vec<(usize, usize)>,
    last: Vec<u32>,
    conf: Vec<FixedBitSet>,
}

fn lit(a: Var, b: Var, eq: bool) -> Option<Lit> {
    // `None` marks a literal that is constant: `x = x` or `x ≠ x`
    (a != b).then(|| Lit {
        a: a.0.min(b.0),
        b: a.0.max(b.0),
        eq,
    })
}

/// Adds a disjunction, dropping constantly false literals and skipping
/// constantly true clauses.
fn push_clause(cnf: &mut Vec<Vec<Lit>>, lits: Vec<(Var, Var, bool)>) {
    let mut out = Vec::new();
    for (a, b, eq) in lits {
        match lit(a, b, eq) {
            Some(l) => out.push(l),
            None if eq => return,
            None => {}
        }
    }
    out.sort_by_key(|l| (l.a, l.b, l.eq));
    out.dedup();
    cnf.push(out);
}

impl<'a> Solver<'a> {
    fn new(cs: &'a ConstraintSystem) -> Self {
        let n = cs.num_vars();
        let (mut lo, mut hi): (Vec<u32>, Vec<u32>) = cs.domains().into_iter().unzip();
        let kinds: Vec<bool> = cs.vars.iter().map(|k| matches!(k, VarKind::Event(_))).collect();
        let count_event = kinds.iter().filter(|k| **k).count() as u32;
        let count_cond = n as u32 - count_event;
        for i in 0..n {
            let cap = if kinds[i] { count_event } else { count_cond };
            hi[i] = hi[i].min(cap.max(1));
            lo[i] = lo[i].max(1);
        }
        let mut cnf = Vec::new();
        let mut special = Vec::new();
        for c in &cs.clauses {
            match c {
                Clause::Eq(a, b) => push_clause(&mut cnf, vec![(*a, *b, true)]),
                Clause::Neq(a, b) => push_clause(&mut cnf, vec![(*a, *b, false)]),
                Clause::Bound(..) => {}
                Clause::Implies { lhs, ssc } => {
                    for (xs, ys) in ssc {
                        for &x in xs {
                            let mut lits = vec![(lhs.0, lhs.1, false)];
                            lits.extend(ys.iter().map(|&y| (x, y, true)));
                            push_clause(&mut cnf, lits);
                        }
                    }
                }
                Clause::Iff { independent: true, disj } => {
                    for &(x, y) in disj {
                        push_clause(&mut cnf, vec![(x, y, false)]);
                    }
                }
                Clause::Iff { independent: false, disj } => {
                    push_clause(&mut cnf, disj.iter().map(|&(x, y)| (x, y, true)).collect());
                }
                _ => special.push(c),
            }
        }
        let mut cnf_of = vec![Vec::new(); n];
        for (ci, c) in cnf.iter().enumerate() {
            let mut vs: Vec<usize> = c.iter().flat_map(|l| [l.a, l.b]).collect();
            vs.sort_unstable();
            vs.dedup();
            for v in vs {
                cnf_of[v].push(ci);
            }
        }
        let special_vars: Vec<Vec<usize>> = special.iter().map(|c| c.vars().into_iter().map(|v| v.0).collect()).collect();
        let mut special_of = vec![Vec::new(); n];
        for (si, vs) in special_vars.iter().enumerate() {
            for &v in vs {
                special_of[v].push(si);
            }
        }
        Solver {
            n,
            lo,
            hi,
            is_event: kinds,
            cnf,
            cnf_of,
            special,
            special_vars,
            special_of,
            vals: vec![None; n],
            prunes: (0..n).map(|_| Vec::new()).collect(),
            trail: Vec::new(),
            last: vec![0; n],
            conf: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    fn undo_from(&mut self, level: usize) {
        while let Some(&(lv, target)) = self.trail.last() {
            if lv < level {
                break;
            }
            self.trail.pop();
            self.prunes[target].pop();
        }
    }

    fn symmetry_limit(&self, i: usize) -> u32 {
        let used = (0..i)
            .filter(|&j| self.is_event[j] == self.is_event[i])
            .filter_map(|j| self.vals[j])
            .max()
            .unwrap_or(0);
        self.hi[i].min(used + 1)
    }

    /// Next value to try at `i`, or `None` when exhausted.
    fn next_value(&self, i: usize) -> Option<u32> {
        let mut forced = None;
        for p in &self.prunes[i] {
            if let Prune::Force(w) = p.prune {
                match forced {
                    None => forced = Some(w),
                    Some(f) if f != w => return None,
                    _ => {}
                }
            }
        }
        let forbidden = |v: u32| self.prunes[i].iter().any(|p| matches!(p.prune, Prune::Forbid(w) if w == v));
        if let Some(w) = forced {
            let ok = w > self.last[i] && w >= self.lo[i] && w <= self.hi[i] && !forbidden(w);
            return ok.then_some(w);
        }
        let start = (self.last[i] + 1).max(self.lo[i]);
        (start..=self.symmetry_limit(i)).find(|&v| !forbidden(v))
    }

    fn lit_value(&self, l: &Lit) -> Tri {
        match (self.vals[l.a], self.vals[l.b]) {
            (Some(x), Some(y)) => {
                if (x == y) == l.eq {
                    Tri::True
                } else {
                    Tri::False
                }
            }
            _ => Tri::Unknown,
        }
    }

    /// Whether a pending prune leaves `y` without values in its domain.
    fn wiped_out(&self, y: usize) -> bool {
        let mut forced = None;
        for p in &self.prunes[y] {
            if let Prune::Force(w) = p.prune {
                if forced.is_some_and(|f| f != w) {
                    return true;
                }
                forced = Some(w);
            }
        }
        let forbidden = |v: u32| self.prunes[y].iter().any(|p| matches!(p.prune, Prune::Forbid(w) if w == v));
        match forced {
            Some(w) => w < self.lo[y] || w > self.hi[y] || forbidden(w),
            None => (self.lo[y]..=self.hi[y]).all(forbidden),
        }
    }

    fn prune_reasons(&self, y: usize, into: &mut FixedBitSet) {
        for p in &self.prunes[y] {
            for &r in &p.reason {
                into.insert(r);
            }
        }
    }

    /// Checks clauses touching `i` after assigning it. On failure returns the
    /// earlier variables responsible.
    fn check(&mut self, i: usize) -> Result<(), FixedBitSet> {
        for k in 0..self.cnf_of[i].len() {
            let ci = self.cnf_of[i][k];
            let mut open = None;
            let mut n_open = 0;
            let mut sat = false;
            for l in &self.cnf[ci] {
                match self.lit_value(l) {
                    Tri::True => {
                        sat = true;
                        break;
                    }
                    Tri::Unknown => {
                        n_open += 1;
                        open = Some(*l);
                    }
                    Tri::False => {}
                }
            }
            if sat || n_open > 1 {
                continue;
            }
            let clause_vars = |skip: usize| {
                let mut r = FixedBitSet::with_capacity(self.n);
                for l in &self.cnf[ci] {
                    for v in [l.a, l.b] {
                        if v != skip && self.vals[v].is_some() {
                            r.insert(v);
                        }
                    }
                }
                r
            };
            let Some(l) = open else {
                let mut r = clause_vars(i);
                r.set(i, false);
                return Err(r);
            };
            let (x, y) = match (self.vals[l.a], self.vals[l.b]) {
                (Some(_), None) => (l.a, l.b),
                (None, Some(_)) => (l.b, l.a),
                _ => continue,
            };
            let w = self.vals[x].expect("assigned");
            let reason: Vec<usize> = clause_vars(y).ones().collect();
            let prune = if l.eq { Prune::Force(w) } else { Prune::Forbid(w) };
            self.prunes[y].push(PruneEntry { prune, reason });
            self.trail.push((i, y));
            if self.wiped_out(y) {
                let mut r = FixedBitSet::with_capacity(self.n);
                self.prune_reasons(y, &mut r);
                r.set(i, false);
                return Err(r);
            }
        }
        for k in 0..self.special_of[i].len() {
            let si = self.special_of[i][k];
            if let Clause::DistinctCountAtLeast { count, .. } = self.special[si] {
                self.check_distinct_at_least(si, *count, i)?;
                continue;
            }
            if eval(self.special[si], &self.vals) == Tri::False {
                let mut r = FixedBitSet::with_capacity(self.n);
                for &v in &self.special_vars[si] {
                    if v != i && self.vals[v].is_some() {
                        r.insert(v);
                    }
                }
                return Err(r);
            }
        }
        Ok(())
    }
}

impl Solver<'_> {
    /// Open variables with a pending `Force` can only repeat a value, so
    /// they add at most the forced values to the count.
    fn check_distinct_at_least(&self, si: usize, count: usize, i: usize) -> Result<(), FixedBitSet> {
        let mut seen = std::collections::BTreeSet::new();
        let mut free = 0;
        let mut reason = FixedBitSet::with_capacity(self.n);
        for &v in &self.special_vars[si] {
            if let Some(x) = self.vals[v] {
                seen.insert(x);
                reason.insert(v);
            } else if let Some(w) = self.prunes[v].iter().find_map(|p| match p.prune {
                Prune::Force(w) => Some(w),
                Prune::Forbid(_) => None,
            }) {
                seen.insert(w);
                self.prune_reasons(v, &mut reason);
            } else {
                free += 1;
            }
        }
        if seen.len() + free >= count {
            return Ok(());
        }
        reason.set(i, false);
        Err(reason)
    }
}

/// External checks consulted during search.
pub trait Oracle {
    /// Called after `var` is assigned and every clause over assigned
    /// variables holds. `Err` carries assigned variables whose current
    /// values rule out every completion of any assignment agreeing with
    /// them.
    fn partial(&mut self, _vals: &[Option<u32>], _var: Var) -> Result<(), Vec<Var>> {
        Ok(())
    }

    fn complete(&mut self, a: &Assignment) -> Verdict;
}

impl<F: FnMut(&Assignment) -> Verdict> Oracle for F {
    fn complete(&mut self, a: &Assignment) -> Verdict {
        self(a)
    }
}

pub fn solve(cs: &ConstraintSystem, config: &SolveConfig) -> SolveOutcome {
    solve_with(cs, config, &mut |_: &Assignment| Verdict::Accept).0
}

/// Like [`solve`], with `verify` consulted on every complete assignment. A
/// rejected assignment makes the search continue with the next candidate in
/// lexicographic order.
pub fn solve_with(
    cs: &ConstraintSystem,
    config: &SolveConfig,
    verify: &mut dyn FnMut(&Assignment) -> Verdict,
) -> (SolveOutcome, SolveStats) {
    solve_with_oracle(cs, config, &mut |a: &Assignment| verify(a))
}

pub fn solve_with_oracle(cs: &ConstraintSystem, config: &SolveConfig, oracle: &mut dyn Oracle) -> (SolveOutcome, SolveStats) {
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let mut s = Solver::new(cs);
    let n = s.n;
    let mut incomplete = false;
    if n == 0 {
        let a = Assignment { values: vec![] };
        let all_ok = cs.clauses.iter().all(|c| eval(c, &[]) != Tri::False);
        return match (all_ok, oracle.complete(&a)) {
            (true, Verdict::Accept) => (SolveOutcome::Sat(a), stats),
            (true, Verdict::Unknown) => (SolveOutcome::Timeout, stats),
            _ => (SolveOutcome::Unsat, stats),
        };
    }
    let mut i = 0;
    loop {
        stats.nodes += 1;
        if config.node_limit.is_some_and(|l| stats.nodes > l) {
            return (SolveOutcome::Timeout, stats);
        }
        if stats.nodes % 1024 == 0 {
            if let Some(b) = config.time_budget {
                if start.elapsed() > b {
                    return (SolveOutcome::Timeout, stats);
                }
            }
        }
        match s.next_value(i) {
            Some(v) => {
                s.last[i] = v;
                s.vals[i] = Some(v);
                let mut checked = s.check(i);
                if checked.is_ok() && i + 1 < n {
                    if let Err(why) = oracle.partial(&s.vals, Var(i)) {
                        stats.rejected += 1;
                        let mut r = FixedBitSet::with_capacity(n);
                        for v in why {
                            r.insert(v.0);
                        }
                        if !r.contains(i) {
                            // no other value of `i` can help
                            s.last[i] = s.hi[i];
                        }
                        r.set(i, false);
                        checked = Err(r);
                    }
                }
                match checked {
                    Err(reason) => {
                        s.conf[i].union_with(&reason);
                        s.undo_from(i);
                        s.vals[i] = None;
                    }
                    Ok(()) if i + 1 < n => {
                        i += 1;
                        s.last[i] = 0;
                        s.conf[i].clear();
                    }
                    Ok(()) => {
                        let a = Assignment {
                            values: s.vals.iter().map(|v| v.expect("complete")).collect(),
                        };
                        stats.checks += 1;
                        match oracle.complete(&a) {
                            Verdict::Accept => return (SolveOutcome::Sat(a), stats),
                            v => {
                                incomplete |= v == Verdict::Unknown;
                                stats.rejected += 1;
                                s.conf[i].insert_range(..i);
                                s.undo_from(i);
                                s.vals[i] = None;
                            }
                        }
                    }
                }
            }
            None => {
                let mut cs_set = s.conf[i].clone();
                s.prune_reasons(i, &mut cs_set);
                cs_set.set(i, false);
                let Some(h) = cs_set.ones().next_back() else {
                    let out = if incomplete { SolveOutcome::Timeout } else { SolveOutcome::Unsat };
                    return (out, stats);
                };
                if h + 1 < i {
                    stats.backjumps += 1;
                }
                cs_set.set(h, false);
                s.conf[h].union_with(&cs_set);
                for j in h..=i {
                    s.vals[j] = None;
                }
                s.undo_from(h);
                i = h;
            }
        }
    }
}
