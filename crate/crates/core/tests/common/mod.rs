#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeSet;

use foldmine::ingest::{parse_independence, parse_log, parse_net, LogFile};
use foldmine::model::{parse_word, Action, EventIdx, IndependenceRelation, OccurrenceNet, PetriNet};

pub fn act(s: &str) -> Action {
    Action::new(s).unwrap()
}

pub fn word(s: &str) -> Vec<Action> {
    parse_word(s).unwrap()
}

pub fn log_and_ind(log: &str, ind: &str) -> (LogFile, IndependenceRelation) {
    let log = parse_log(log).unwrap();
    let ind = parse_independence(ind, &log.alphabet()).unwrap();
    (log, ind)
}

/// The running example: traces `abc` and `bd`, everything dependent.
pub fn running_example() -> (LogFile, IndependenceRelation) {
    log_and_ind("a b c\nb d\n", "")
}

/// Names events of a small unfolding: the label, suffixed with the labels of
/// its history when the label occurs more than once (`b[a]` = b after a).
pub fn event_name(net: &OccurrenceNet, e: EventIdx) -> String {
    let label = net.label(e).name().to_string();
    let dup = net.event_ids().filter(|f| net.label(*f).name() == label).count() > 1;
    if dup {
        let hist: Vec<&str> = net.event(e).history.iter().map(|h| net.label(*h).name()).collect();
        format!("{label}[{}]", hist.join(","))
    } else {
        label
    }
}

pub fn find(net: &OccurrenceNet, name: &str) -> EventIdx {
    net.event_ids().find(|e| event_name(net, *e) == name).unwrap_or_else(|| panic!("no event {name}"))
}

/// Conditions as `(generator name or "init", sorted consumer names)`.
pub fn condition_shapes(net: &OccurrenceNet) -> BTreeSet<(String, Vec<String>)> {
    net.condition_ids()
        .map(|b| {
            let c = net.condition(b);
            let g = c.generator.map_or("init".to_string(), |g| event_name(net, g));
            let mut cons: Vec<String> = c.consumers.iter().map(|e| event_name(net, *e)).collect();
            cons.sort();
            (g, cons)
        })
        .collect()
}

pub fn shapes(items: &[(&str, &[&str])]) -> BTreeSet<(String, Vec<String>)> {
    items
        .iter()
        .map(|(g, c)| (g.to_string(), c.iter().map(|s| s.to_string()).collect()))
        .collect()
}

use foldmine::model::{CondIdx, FoldingEquivalence};

/// The three equivalences of the running example, over its unfolding:
/// merge the two b-events; additionally merge the initial condition with
/// the one after `a`; additionally merge the conditions after the b-events.
pub fn running_equivalences(net: &OccurrenceNet) -> [FoldingEquivalence; 3] {
    let bs = [find(net, "b[]"), find(net, "b[a]")];
    let events: Vec<Vec<EventIdx>> = net
        .event_ids()
        .filter(|e| !bs.contains(e))
        .map(|e| vec![e])
        .chain([bs.to_vec()])
        .collect();
    let c = |i: usize| CondIdx(i);
    let singles = |skip: &[usize]| -> Vec<Vec<CondIdx>> { (0..6).filter(|i| !skip.contains(i)).map(|i| vec![c(i)]).collect() };
    let eq1 = FoldingEquivalence::from_classes(&events, &singles(&[])).unwrap();
    let mut conds2 = singles(&[0, 1]);
    conds2.push(vec![c(0), c(1)]);
    let eq2 = FoldingEquivalence::from_classes(&events, &conds2).unwrap();
    let mut conds3 = singles(&[0, 1, 2, 3]);
    conds3.push(vec![c(0), c(1)]);
    conds3.push(vec![c(2), c(3)]);
    let eq3 = FoldingEquivalence::from_classes(&events, &conds3).unwrap();
    [eq1, eq2, eq3]
}

pub fn words(items: &[&str]) -> BTreeSet<Vec<Action>> {
    items.iter().map(|s| word(s)).collect()
}

pub fn net(text: &str) -> PetriNet {
    parse_net(text).unwrap()
}

pub fn sequence() -> PetriNet {
    net("place p0 init 1\nplace p1\nplace p2\nplace p3\ntrans ta label a\ntrans tb label b\ntrans tc label c\narc p0 ta\narc ta p1\narc p1 tb\narc tb p2\narc p2 tc\narc tc p3\n")
}

pub fn choice() -> PetriNet {
    net("place p0 init 1\nplace p1\nplace p2\ntrans ta label a\ntrans tb label b\ntrans tc label c\narc p0 ta\narc p0 tb\narc ta p1\narc tb p1\narc p1 tc\narc tc p2\n")
}

pub fn concurrency() -> PetriNet {
    net("place p0 init 1\nplace p1 init 1\nplace p2\nplace p3\nplace p4\ntrans ta label a\ntrans tb label b\ntrans tc label c\narc p0 ta\narc ta p2\narc p1 tb\narc tb p3\narc p2 tc\narc p3 tc\narc tc p4\n")
}

pub fn cycle() -> PetriNet {
    net("place p0 init 1\nplace p1\ntrans ta label a\ntrans tb label b\narc p0 ta\narc ta p1\narc p1 tb\narc tb p0\n")
}
