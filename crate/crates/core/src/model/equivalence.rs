use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{CondIdx, EventIdx, ModelError, OccurrenceNet};

/// An equivalence on the nodes of an occurrence net that never relates an
/// event with a condition.
///
/// Classes are numbered canonically: class `n` is the `n`-th class in order of
/// its smallest member.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FoldingEquivalence {
    events: BTreeMap<EventIdx, usize>,
    conditions: BTreeMap<CondIdx, usize>,
}

impl FoldingEquivalence {
    /// Every live node in its own class.
    pub fn identity(net: &OccurrenceNet) -> Self {
        Self::from_keys(net.event_ids().map(|e| (e, e.0)), net.condition_ids().map(|b| (b, b.0)))
    }

    /// Builds from arbitrary class keys; nodes with equal keys share a class.
    pub fn from_keys<K1: Ord, K2: Ord>(
        events: impl IntoIterator<Item = (EventIdx, K1)>,
        conditions: impl IntoIterator<Item = (CondIdx, K2)>,
    ) -> Self {
        FoldingEquivalence {
            events: canonical(events),
            conditions: canonical(conditions),
        }
    }

    /// Builds from explicit class lists. Nodes may not appear twice.
    pub fn from_classes(events: &[Vec<EventIdx>], conditions: &[Vec<CondIdx>]) -> Result<Self, ModelError> {
        let mut ev = Vec::new();
        for (k, class) in events.iter().enumerate() {
            for &e in class {
                ev.push((e, k));
            }
        }
        let mut co = Vec::new();
        for (k, class) in conditions.iter().enumerate() {
            for &b in class {
                co.push((b, k));
            }
        }
        let ev_ids: BTreeSet<_> = ev.iter().map(|x| x.0).collect();
        let co_ids: BTreeSet<_> = co.iter().map(|x| x.0).collect();
        if ev_ids.len() != ev.len() || co_ids.len() != co.len() {
            return Err(ModelError::OverlappingClasses);
        }
        Ok(Self::from_keys(ev, co))
    }

    pub fn event_class(&self, e: EventIdx) -> Option<usize> {
        self.events.get(&e).copied()
    }

    pub fn condition_class(&self, b: CondIdx) -> Option<usize> {
        self.conditions.get(&b).copied()
    }

    pub fn num_event_classes(&self) -> usize {
        self.events.values().max().map_or(0, |m| m + 1)
    }

    pub fn num_condition_classes(&self) -> usize {
        self.conditions.values().max().map_or(0, |m| m + 1)
    }

    pub fn events(&self) -> impl Iterator<Item = (EventIdx, usize)> + '_ {
        self.events.iter().map(|(e, c)| (*e, *c))
    }

    pub fn conditions(&self) -> impl Iterator<Item = (CondIdx, usize)> + '_ {
        self.conditions.iter().map(|(b, c)| (*b, *c))
    }

    pub fn event_classes(&self) -> Vec<Vec<EventIdx>> {
        let mut out = vec![Vec::new(); self.num_event_classes()];
        for (e, c) in self.events() {
            out[c].push(e);
        }
        out
    }

    pub fn condition_classes(&self) -> Vec<Vec<CondIdx>> {
        let mut out = vec![Vec::new(); self.num_condition_classes()];
        for (b, c) in self.conditions() {
            out[c].push(b);
        }
        out
    }

    /// Restricts to the live nodes of `net`, adding singleton classes for
    /// live nodes not covered, and renumbers canonically.
    pub fn normalized_for(&self, net: &OccurrenceNet) -> Self {
        let ev = net.event_ids().map(|e| match self.event_class(e) {
            Some(c) => (e, (0, c)),
            None => (e, (1, e.0)),
        });
        let co = net.condition_ids().map(|b| match self.condition_class(b) {
            Some(c) => (b, (0, c)),
            None => (b, (1, b.0)),
        });
        Self::from_keys(ev.collect::<Vec<_>>(), co.collect::<Vec<_>>())
    }

    /// Whether `self` is contained in `other`.
    pub fn refines(&self, other: &FoldingEquivalence) -> bool {
        fn check<K: Ord + Copy>(a: &BTreeMap<K, usize>, b: &BTreeMap<K, usize>) -> bool {
            let mut image: BTreeMap<usize, Option<usize>> = BTreeMap::new();
            for (k, ca) in a {
                let cb = b.get(k).copied();
                match image.get(ca) {
                    Some(prev) if *prev != cb => return false,
                    _ => {
                        image.insert(*ca, cb);
                    }
                }
            }
            true
        }
        check(&self.events, &other.events) && check(&self.conditions, &other.conditions)
    }

    /// Text form: one `eclass N: e.. ` or `pclass N: b..` line per class.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, class) in self.event_classes().iter().enumerate() {
            let ids: Vec<String> = class.iter().map(|e| format!("e{}", e.0)).collect();
            let _ = writeln!(s, "eclass {k}: {}", ids.join(" "));
        }
        for (k, class) in self.condition_classes().iter().enumerate() {
            let ids: Vec<String> = class.iter().map(|b| format!("b{}", b.0)).collect();
            let _ = writeln!(s, "pclass {k}: {}", ids.join(" "));
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self, ModelError> {
        let mut ev: Vec<Vec<EventIdx>> = Vec::new();
        let mut co: Vec<Vec<CondIdx>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || ModelError::MalformedEquivalence(lineno + 1);
            let (head, rest) = line.split_once(':').ok_or_else(bad)?;
            let mut head = head.split_whitespace();
            let kind = head.next().ok_or_else(bad)?;
            head.next().ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?;
            let parse_id = |tok: &str, prefix: char| -> Result<usize, ModelError> {
                tok.strip_prefix(prefix).unwrap_or(tok).parse::<usize>().map_err(|_| bad())
            };
            match kind {
                "eclass" => ev.push(rest.split_whitespace().map(|t| parse_id(t, 'e').map(EventIdx)).collect::<Result<_, _>>()?),
                "pclass" => co.push(rest.split_whitespace().map(|t| parse_id(t, 'b').map(CondIdx)).collect::<Result<_, _>>()?),
                _ => return Err(bad()),
            }
        }
        Self::from_classes(&ev, &co)
    }
}

fn canonical<I: Ord + Copy, K: Ord>(items: impl IntoIterator<Item = (I, K)>) -> BTreeMap<I, usize> {
    let items: BTreeMap<I, K> = items.into_iter().collect();
    let mut numbering: BTreeMap<&K, usize> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for (i, k) in &items {
        let next = numbering.len();
        let c = *numbering.entry(k).or_insert(next);
        out.insert(*i, c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_numbering() {
        let eq = FoldingEquivalence::from_keys(
            [(EventIdx(0), 7), (EventIdx(1), 3), (EventIdx(2), 7)],
            [(CondIdx(4), "x"), (CondIdx(1), "y")],
        );
        assert_eq!(eq.event_class(EventIdx(0)), Some(0));
        assert_eq!(eq.event_class(EventIdx(1)), Some(1));
        assert_eq!(eq.event_class(EventIdx(2)), Some(0));
        assert_eq!(eq.condition_class(CondIdx(1)), Some(0));
        assert_eq!(eq.num_condition_classes(), 2);
    }

    #[test]
    fn text_round_trip() {
        let eq = FoldingEquivalence::from_classes(
            &[vec![EventIdx(0), EventIdx(2)], vec![EventIdx(1)]],
            &[vec![CondIdx(0)], vec![CondIdx(1), CondIdx(2)]],
        )
        .unwrap();
        let text = eq.to_text();
        assert_eq!(text, "eclass 0: e0 e2\neclass 1: e1\npclass 0: b0\npclass 1: b1 b2\n");
        assert_eq!(FoldingEquivalence::parse_text(&text).unwrap(), eq);
    }

    #[test]
    fn overlap_rejected() {
        let r = FoldingEquivalence::from_classes(&[vec![EventIdx(0)], vec![EventIdx(0)]], &[]);
        assert_eq!(r, Err(ModelError::OverlappingClasses));
    }

    #[test]
    fn refinement() {
        let fine = FoldingEquivalence::from_keys([(EventIdx(0), 0), (EventIdx(1), 1)], Vec::<(CondIdx, u8)>::new());
        let coarse = FoldingEquivalence::from_keys([(EventIdx(0), 0), (EventIdx(1), 0)], Vec::<(CondIdx, u8)>::new());
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
    }
}
