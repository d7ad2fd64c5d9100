use std::fmt;

use crate::folding::IpScope;
use crate::model::{CondIdx, EventIdx};

/// Index of a solver variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Event(EventIdx),
    Condition(CondIdx),
}

/// Clauses over integer variables. Only equalities between variables of the
/// same kind ever occur.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clause {
    Eq(Var, Var),
    Neq(Var, Var),
    /// `lo ≤ v ≤ hi`.
    Bound(Var, u32, u32),
    /// `v_e = v_f ⇒ ∧ SSC(X, Y)`, where `SSC(X, Y) = ∧_{x∈X} ∨_{y∈Y} x = y`.
    Implies { lhs: (Var, Var), ssc: Vec<(Vec<Var>, Vec<Var>)> },
    /// `independent ⇔ ∧_{(x,y)∈disj} x ≠ y`.
    Iff { independent: bool, disj: Vec<(Var, Var)> },
    /// `¬SSC(from, into)`.
    NotSsc { from: Vec<Var>, into: Vec<Var> },
    /// At least `count` distinct values among `vars`.
    DistinctCountAtLeast { vars: Vec<Var>, count: usize },
    /// At most `count` distinct values among `vars`.
    DistinctCountAtMost { vars: Vec<Var>, count: usize },
}

impl Clause {
    pub fn vars(&self) -> Vec<Var> {
        let mut v = match self {
            Clause::Eq(a, b) | Clause::Neq(a, b) => vec![*a, *b],
            Clause::Bound(a, _, _) => vec![*a],
            Clause::Implies { lhs, ssc } => {
                let mut v = vec![lhs.0, lhs.1];
                for (x, y) in ssc {
                    v.extend(x);
                    v.extend(y);
                }
                v
            }
            Clause::Iff { disj, .. } => disj.iter().flat_map(|(a, b)| [*a, *b]).collect(),
            Clause::NotSsc { from, into } => from.iter().chain(into).copied().collect(),
            Clause::DistinctCountAtLeast { vars, .. } | Clause::DistinctCountAtMost { vars, .. } => vars.clone(),
        };
        v.sort();
        v.dedup();
        v
    }
}

/// Which formula families an encoding contains.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Formulas {
    pub sp: bool,
    pub ip: Option<IpScope>,
    pub ra: bool,
    /// Transition bound.
    pub met: Option<usize>,
    pub label_merge: bool,
    pub min_places: Option<usize>,
    pub max_places: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    /// Canonical variable order: initial conditions, then each event (in
    /// node order) followed by the conditions it generates, then any other
    /// conditions.
    pub vars: Vec<VarKind>,
    pub clauses: Vec<Clause>,
    pub formulas: Formulas,
}

impl ConstraintSystem {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn event_vars(&self) -> impl Iterator<Item = (Var, EventIdx)> + '_ {
        self.vars.iter().enumerate().filter_map(|(i, k)| match k {
            VarKind::Event(e) => Some((Var(i), *e)),
            _ => None,
        })
    }

    pub fn condition_vars(&self) -> impl Iterator<Item = (Var, CondIdx)> + '_ {
        self.vars.iter().enumerate().filter_map(|(i, k)| match k {
            VarKind::Condition(b) => Some((Var(i), *b)),
            _ => None,
        })
    }

    /// Domain of each variable after intersecting all `Bound` clauses.
    pub fn domains(&self) -> Vec<(u32, u32)> {
        let mut d = vec![(1u32, u32::MAX); self.vars.len()];
        for c in &self.clauses {
            if let Clause::Bound(v, lo, hi) = c {
                d[v.0].0 = d[v.0].0.max(*lo);
                d[v.0].1 = d[v.0].1.min(*hi);
            }
        }
        d
    }

    /// Checks a complete assignment against every clause.
    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        let vals: Vec<Option<u32>> = a.values.iter().map(|v| Some(*v)).collect();
        a.values.len() == self.vars.len() && self.clauses.iter().all(|c| eval(c, &vals) == Tri::True)
    }

    pub fn var_name(&self, v: Var) -> String {
        match self.vars[v.0] {
            VarKind::Event(e) => format!("v_e{}", e.0),
            VarKind::Condition(b) => format!("v_b{}", b.0),
        }
    }
}

/// One value per variable, starting at 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub values: Vec<u32>,
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }

    fn and(items: impl IntoIterator<Item = Tri>) -> Tri {
        let mut out = Tri::True;
        for t in items {
            match t {
                Tri::False => return Tri::False,
                Tri::Unknown => out = Tri::Unknown,
                Tri::True => {}
            }
        }
        out
    }

    fn or(items: impl IntoIterator<Item = Tri>) -> Tri {
        Tri::and(items.into_iter().map(Tri::not)).not()
    }
}

fn eq(vals: &[Option<u32>], a: Var, b: Var) -> Tri {
    if a == b {
        return Tri::True;
    }
    match (vals[a.0], vals[b.0]) {
        (Some(x), Some(y)) => {
            if x == y {
                Tri::True
            } else {
                Tri::False
            }
        }
        _ => Tri::Unknown,
    }
}

fn ssc(vals: &[Option<u32>], xs: &[Var], ys: &[Var]) -> Tri {
    Tri::and(xs.iter().map(|&x| Tri::or(ys.iter().map(|&y| eq(vals, x, y)))))
}

/// Three-valued evaluation under a partial assignment.
pub fn eval(c: &Clause, vals: &[Option<u32>]) -> Tri {
    match c {
        Clause::Eq(a, b) => eq(vals, *a, *b),
        Clause::Neq(a, b) => eq(vals, *a, *b).not(),
        Clause::Bound(v, lo, hi) => match vals[v.0] {
            Some(x) if x >= *lo && x <= *hi => Tri::True,
            Some(_) => Tri::False,
            None => Tri::Unknown,
        },
        Clause::Implies { lhs, ssc: parts } => {
            let l = eq(vals, lhs.0, lhs.1);
            let r = Tri::and(parts.iter().map(|(x, y)| ssc(vals, x, y)));
            Tri::or([l.not(), r])
        }
        Clause::Iff { independent, disj } => {
            let d = Tri::and(disj.iter().map(|(x, y)| eq(vals, *x, *y).not()));
            if *independent {
                d
            } else {
                d.not()
            }
        }
        Clause::NotSsc { from, into } => ssc(vals, from, into).not(),
        Clause::DistinctCountAtLeast { vars, count } => {
            let (distinct, open) = count_distinct(vals, vars);
            if distinct >= *count {
                Tri::True
            } else if distinct + open < *count {
                Tri::False
            } else {
                Tri::Unknown
            }
        }
        Clause::DistinctCountAtMost { vars, count } => {
            let (distinct, open) = count_distinct(vals, vars);
            if distinct > *count {
                Tri::False
            } else if open == 0 {
                Tri::True
            } else {
                Tri::Unknown
            }
        }
    }
}

pub(crate) fn count_distinct(vals: &[Option<u32>], vars: &[Var]) -> (usize, usize) {
    let mut seen = std::collections::BTreeSet::new();
    let mut open = 0;
    for v in vars {
        match vals[v.0] {
            Some(x) => {
                seen.insert(x);
            }
            None => open += 1,
        }
    }
    (seen.len(), open)
}
