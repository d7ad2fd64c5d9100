use std::fmt::Write as _;

use super::system::{Clause, ConstraintSystem, Var};

fn and(parts: Vec<String>) -> String {
    match parts.len() {
        0 => "true".into(),
        1 => parts.into_iter().next().expect("one part"),
        _ => format!("(and {})", parts.join(" ")),
    }
}

fn or(parts: Vec<String>) -> String {
    match parts.len() {
        0 => "false".into(),
        1 => parts.into_iter().next().expect("one part"),
        _ => format!("(or {})", parts.join(" ")),
    }
}

/// Renders the system as an SMT-LIB v2 script over linear integer
/// arithmetic. Distinct-value counts use one 0/1 indicator per value.
pub fn emit_smtlib(cs: &ConstraintSystem) -> String {
    let name = |v: &Var| cs.var_name(*v);
    let eq = |a: &Var, b: &Var| format!("(= {} {})", name(a), name(b));
    let ssc = |xs: &[Var], ys: &[Var]| and(xs.iter().map(|x| or(ys.iter().map(|y| eq(x, y)).collect())).collect());
    let domains = cs.domains();
    let mut out = String::from("(set-logic QF_LIA)\n");
    for i in 0..cs.num_vars() {
        let _ = writeln!(out, "(declare-const {} Int)", name(&Var(i)));
    }
    for (ci, c) in cs.clauses.iter().enumerate() {
        let body = match c {
            Clause::Eq(a, b) => eq(a, b),
            Clause::Neq(a, b) => format!("(not {})", eq(a, b)),
            Clause::Bound(v, lo, hi) => format!("(and (<= {lo} {0}) (<= {0} {hi}))", name(v)),
            Clause::Implies { lhs, ssc: parts } => {
                format!("(=> {} {})", eq(&lhs.0, &lhs.1), and(parts.iter().map(|(x, y)| ssc(x, y)).collect()))
            }
            Clause::Iff { independent, disj } => {
                let d = and(disj.iter().map(|(x, y)| format!("(not {})", eq(x, y))).collect());
                if *independent {
                    d
                } else {
                    format!("(not {d})")
                }
            }
            Clause::NotSsc { from, into } => format!("(not {})", ssc(from, into)),
            Clause::DistinctCountAtLeast { vars, count } | Clause::DistinctCountAtMost { vars, count } => {
                let at_least = matches!(c, Clause::DistinctCountAtLeast { .. });
                let mut top = vars.iter().map(|v| domains[v.0].1).max().unwrap_or(0);
                if top as usize > cs.num_vars() {
                    // Clauses only compare variables, so any model can be
                    // renamed into `1..=n`.
                    top = cs.num_vars() as u32;
                    for v in vars {
                        let _ = writeln!(out, "(assert (and (<= 1 {0}) (<= {0} {top})))", name(v));
                    }
                }
                let mut terms = Vec::new();
                for value in 1..=top {
                    let u = format!("d{ci}_{value}");
                    let _ = writeln!(out, "(declare-const {u} Int)");
                    let _ = writeln!(out, "(assert (and (<= 0 {u}) (<= {u} 1)))");
                    let hit = or(vars.iter().map(|v| format!("(= {} {value})", name(v))).collect());
                    if at_least {
                        let _ = writeln!(out, "(assert (=> (= {u} 1) {hit}))");
                    } else {
                        let _ = writeln!(out, "(assert (=> {hit} (= {u} 1)))");
                    }
                    terms.push(u);
                }
                let sum = match terms.len() {
                    0 => "0".to_string(),
                    1 => terms[0].clone(),
                    _ => format!("(+ {})", terms.join(" ")),
                };
                if at_least {
                    format!("(>= {sum} {count})")
                } else {
                    format!("(<= {sum} {count})")
                }
            }
        };
        let _ = writeln!(out, "(assert {body})");
    }
    out.push_str("(check-sat)\n(get-model)\n");
    out
}
