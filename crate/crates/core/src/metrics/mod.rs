//! Fitness, negative exclusion, independence ratios and a prefix-based
//! precision estimate.
//!
//! The precision estimate is a simple escaping-edges count over the log's
//! prefix tree, not an alignment-based precision metric.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::ingest::LogFile;
use crate::model::{Action, Marking, PetriNet};
use crate::semantics::{naturally_independent, replay, SemanticsError};

/// An unordered pair of distinct labels, stored smaller first.
pub type LabelPair = (Action, Action);

#[derive(Clone, Debug, PartialEq)]
pub struct Fitness {
    pub ratio: f64,
    pub accepted: usize,
    pub rejected: usize,
    /// Traces whose replay ran out of budget; counted as unfit.
    pub undecided: usize,
}

/// Fraction of log traces the net can replay. An empty log fits.
pub fn fitness(net: &PetriNet, log: &LogFile, budget: usize) -> Fitness {
    let mut f = Fitness {
        ratio: 1.0,
        accepted: 0,
        rejected: 0,
        undecided: 0,
    };
    for t in &log.traces {
        match replay(net, t, budget) {
            Ok(r) if r.accepted() => f.accepted += 1,
            Ok(_) => f.rejected += 1,
            Err(_) => f.undecided += 1,
        }
    }
    if !log.traces.is_empty() {
        f.ratio = f.accepted as f64 / log.traces.len() as f64;
    }
    f
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exclusion {
    Excluded,
    /// Negative traces the net accepts.
    Violated(Vec<Vec<Action>>),
    /// Some replay ran out of budget and none was accepted.
    Unknown(Vec<Vec<Action>>),
}

pub fn excludes_negatives(net: &PetriNet, negatives: &LogFile, budget: usize) -> Exclusion {
    let mut accepted = Vec::new();
    let mut unknown = Vec::new();
    for t in &negatives.traces {
        match replay(net, t, budget) {
            Ok(r) if r.accepted() => accepted.push(t.clone()),
            Ok(_) => {}
            Err(_) => unknown.push(t.clone()),
        }
    }
    if !accepted.is_empty() {
        Exclusion::Violated(accepted)
    } else if !unknown.is_empty() {
        Exclusion::Unknown(unknown)
    } else {
        Exclusion::Excluded
    }
}

pub fn label_pair(a: &Action, b: &Action) -> LabelPair {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Natural independence lifted to labels: two distinct labels are
/// independent if some pair of transitions carrying them is.
pub fn label_independence(net: &PetriNet) -> BTreeSet<LabelPair> {
    let mut out = BTreeSet::new();
    for t in net.transition_ids() {
        for u in net.transition_ids() {
            let (a, b) = (net.label(t), net.label(u));
            if a < b && naturally_independent(net, t, u) {
                out.insert(label_pair(a, b));
            }
        }
    }
    out
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// `(|ref ∩ mined| / |ref|, |ref ∩ mined| / |mined|)`, with `0/0 = 1`.
pub fn independence_ratios(reference: &BTreeSet<LabelPair>, mined: &BTreeSet<LabelPair>) -> (f64, f64) {
    let common = reference.intersection(mined).count();
    (ratio(common, reference.len()), ratio(common, mined.len()))
}

#[derive(Default)]
struct PrefixNode {
    children: BTreeMap<Action, PrefixNode>,
}

fn step(net: &PetriNet, states: &BTreeSet<Marking>, a: &Action, budget: usize) -> Result<BTreeSet<Marking>, SemanticsError> {
    let mut out = BTreeSet::new();
    for m in states {
        for t in net.enabled(m) {
            if net.label(t) == a {
                out.insert(net.fire(m, t)?);
                if out.len() > budget {
                    return Err(SemanticsError::BudgetExceeded(budget));
                }
            }
        }
    }
    Ok(out)
}

/// `1 − escaping / enabled`, summed over all prefixes of the log. At each
/// prefix, `enabled` counts the labels the net enables in some marking
/// reachable by that prefix, and `escaping` those among them that no log
/// trace continues with.
pub fn precision_proxy(net: &PetriNet, log: &LogFile, budget: usize) -> Result<f64, SemanticsError> {
    let mut root = PrefixNode::default();
    for t in &log.traces {
        let mut node = &mut root;
        for a in t {
            node = node.children.entry(a.clone()).or_default();
        }
    }
    let mut enabled_total = 0usize;
    let mut escaping = 0usize;
    let start: BTreeSet<Marking> = [net.initial_marking().clone()].into();
    let mut stack = vec![(&root, start)];
    while let Some((node, states)) = stack.pop() {
        let enabled: BTreeSet<&Action> = states.iter().flat_map(|m| net.enabled(m)).map(|t| net.label(t)).collect();
        enabled_total += enabled.len();
        escaping += enabled.iter().filter(|a| !node.children.contains_key(**a)).count();
        for (a, child) in &node.children {
            let next = step(net, &states, a, budget)?;
            if !next.is_empty() {
                stack.push((child, next));
            }
        }
    }
    Ok(1.0 - escaping as f64 / enabled_total.max(1) as f64)
}

/// Everything the `metrics` command reports.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub transitions: usize,
    pub places: usize,
    pub fitness: Fitness,
    pub negatives: Option<Exclusion>,
    pub ratios: Option<(f64, f64)>,
    pub precision: Option<f64>,
}

impl MetricsReport {
    fn rows(&self) -> Vec<(&'static str, String)> {
        let mut rows = vec![
            ("transitions", self.transitions.to_string()),
            ("places", self.places.to_string()),
            ("fitness", format!("{:.4}", self.fitness.ratio)),
            ("traces_accepted", self.fitness.accepted.to_string()),
            ("traces_rejected", self.fitness.rejected.to_string()),
            ("traces_undecided", self.fitness.undecided.to_string()),
        ];
        if let Some(n) = &self.negatives {
            let v = match n {
                Exclusion::Excluded => "true",
                Exclusion::Violated(_) => "false",
                Exclusion::Unknown(_) => "unknown",
            };
            rows.push(("negatives_excluded", v.to_string()));
            if let Exclusion::Violated(ts) = n {
                rows.push(("negatives_accepted", ts.len().to_string()));
            }
        }
        if let Some((sm, ms)) = self.ratios {
            rows.push(("r_sm", format!("{sm:.4}")));
            rows.push(("r_ms", format!("{ms:.4}")));
        }
        rows.push((
            "precision_proxy",
            self.precision.map_or_else(|| "unknown".to_string(), |p| format!("{p:.4}")),
        ));
        rows
    }

    /// One `key=value` line per metric.
    pub fn to_kv(&self) -> String {
        self.rows().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn to_table(&self) -> String {
        let rows = self.rows();
        let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut s = String::new();
        for (k, v) in rows {
            let _ = writeln!(s, "{k:<w$}  {v}");
        }
        s
    }
}

pub fn report(net: &PetriNet, log: &LogFile, negatives: Option<&LogFile>, reference: Option<&BTreeSet<LabelPair>>, budget: usize) -> MetricsReport {
    MetricsReport {
        transitions: net.num_transitions(),
        places: net.num_places(),
        fitness: fitness(net, log, budget),
        negatives: negatives.map(|n| excludes_negatives(net, n, budget)),
        ratios: reference.map(|r| independence_ratios(r, &label_independence(net))),
        precision: precision_proxy(net, log, budget).ok(),
    }
}
