use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Action, ModelError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceIdx(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransIdx(pub usize);

/// A marking: token counts per place. Zero entries are never stored.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(BTreeMap<PlaceIdx, u32>);

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, p: PlaceIdx) -> u32 {
        self.0.get(&p).copied().unwrap_or(0)
    }

    pub fn set(&mut self, p: PlaceIdx, n: u32) {
        if n == 0 {
            self.0.remove(&p);
        } else {
            self.0.insert(p, n);
        }
    }

    pub fn add(&mut self, p: PlaceIdx, n: u32) {
        let v = self.get(p) + n;
        self.set(p, v);
    }

    /// Removes `n` tokens; returns false (and leaves the marking) if too few.
    pub fn remove(&mut self, p: PlaceIdx, n: u32) -> bool {
        let v = self.get(p);
        if v < n {
            return false;
        }
        self.set(p, v - n);
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = (PlaceIdx, u32)> + '_ {
        self.0.iter().map(|(p, n)| (*p, *n))
    }

    pub fn total(&self) -> u64 {
        self.0.values().map(|&n| n as u64).sum()
    }

    pub fn is_safe(&self) -> bool {
        self.0.values().all(|&n| n <= 1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter().map(|(p, n)| (p.0, n))).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub label: Action,
    pub preset: Vec<PlaceIdx>,
    pub postset: Vec<PlaceIdx>,
}

/// A labelled place/transition net with unit arc weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetriNet {
    pub name: String,
    places: Vec<Place>,
    transitions: Vec<Transition>,
    initial: Marking,
}

impl PetriNet {
    pub fn new(name: impl Into<String>) -> Self {
        PetriNet {
            name: name.into(),
            places: Vec::new(),
            transitions: Vec::new(),
            initial: Marking::new(),
        }
    }

    pub fn add_place(&mut self, name: impl Into<String>, tokens: u32) -> PlaceIdx {
        let idx = PlaceIdx(self.places.len());
        self.places.push(Place { name: name.into() });
        self.initial.set(idx, tokens);
        idx
    }

    pub fn add_transition(&mut self, name: impl Into<String>, label: Action) -> TransIdx {
        let idx = TransIdx(self.transitions.len());
        self.transitions.push(Transition {
            name: name.into(),
            label,
            preset: Vec::new(),
            postset: Vec::new(),
        });
        idx
    }

    /// Adds the arc `p → t`. Duplicate arcs are ignored.
    pub fn add_input_arc(&mut self, p: PlaceIdx, t: TransIdx) {
        insert_sorted(&mut self.transitions[t.0].preset, p);
    }

    /// Adds the arc `t → p`. Duplicate arcs are ignored.
    pub fn add_output_arc(&mut self, t: TransIdx, p: PlaceIdx) {
        insert_sorted(&mut self.transitions[t.0].postset, p);
    }

    pub fn set_initial(&mut self, p: PlaceIdx, tokens: u32) {
        self.initial.set(p, tokens);
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn place(&self, p: PlaceIdx) -> &Place {
        &self.places[p.0]
    }

    pub fn transition(&self, t: TransIdx) -> &Transition {
        &self.transitions[t.0]
    }

    pub fn place_ids(&self) -> impl Iterator<Item = PlaceIdx> {
        (0..self.places.len()).map(PlaceIdx)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransIdx> {
        (0..self.transitions.len()).map(TransIdx)
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.transitions.iter().map(|t| t.preset.len() + t.postset.len()).sum()
    }

    pub fn label(&self, t: TransIdx) -> &Action {
        &self.transitions[t.0].label
    }

    pub fn labels(&self) -> BTreeSet<Action> {
        self.transitions.iter().map(|t| t.label.clone()).collect()
    }

    pub fn place_by_name(&self, name: &str) -> Option<PlaceIdx> {
        self.places.iter().position(|p| p.name == name).map(PlaceIdx)
    }

    pub fn transition_by_name(&self, name: &str) -> Option<TransIdx> {
        self.transitions.iter().position(|t| t.name == name).map(TransIdx)
    }

    /// Transitions consuming from `p`.
    pub fn consumers(&self, p: PlaceIdx) -> Vec<TransIdx> {
        self.transition_ids().filter(|t| self.transition(*t).preset.contains(&p)).collect()
    }

    /// Transitions producing into `p`.
    pub fn producers(&self, p: PlaceIdx) -> Vec<TransIdx> {
        self.transition_ids().filter(|t| self.transition(*t).postset.contains(&p)).collect()
    }

    pub fn is_enabled(&self, m: &Marking, t: TransIdx) -> bool {
        self.transitions[t.0].preset.iter().all(|&p| m.get(p) >= 1)
    }

    pub fn enabled(&self, m: &Marking) -> Vec<TransIdx> {
        self.transition_ids().filter(|&t| self.is_enabled(m, t)).collect()
    }

    /// Fires `t` at `m`.
    pub fn fire(&self, m: &Marking, t: TransIdx) -> Result<Marking, ModelError> {
        if !self.is_enabled(m, t) {
            return Err(ModelError::NotEnabled(self.transitions[t.0].name.clone()));
        }
        let tr = &self.transitions[t.0];
        let mut next = m.clone();
        for &p in &tr.preset {
            next.remove(p, 1);
        }
        for &p in &tr.postset {
            next.add(p, 1);
        }
        Ok(next)
    }

    /// Checks for a bijection of places and transitions that preserves
    /// labels, arcs and the initial marking. Names are ignored.
    pub fn is_isomorphic(&self, other: &PetriNet) -> bool {
        iso::isomorphic(self, other)
    }
}

fn insert_sorted<T: Ord>(v: &mut Vec<T>, x: T) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

mod iso {
    use super::*;

    struct Search<'a> {
        a: &'a PetriNet,
        b: &'a PetriNet,
        a_cons: Vec<Vec<TransIdx>>,
        b_cons: Vec<Vec<TransIdx>>,
        a_prod: Vec<Vec<TransIdx>>,
        b_prod: Vec<Vec<TransIdx>>,
        pmap: Vec<Option<PlaceIdx>>,
        pused: Vec<bool>,
    }

    fn place_sig(net: &PetriNet, cons: &[Vec<TransIdx>], prod: &[Vec<TransIdx>], p: PlaceIdx) -> (u32, Vec<Action>, Vec<Action>) {
        let mut c: Vec<Action> = cons[p.0].iter().map(|t| net.label(*t).clone()).collect();
        let mut d: Vec<Action> = prod[p.0].iter().map(|t| net.label(*t).clone()).collect();
        c.sort();
        d.sort();
        (net.initial_marking().get(p), c, d)
    }

    fn trans_sig(net: &PetriNet, t: TransIdx) -> (Action, usize, usize) {
        let tr = net.transition(t);
        (tr.label.clone(), tr.preset.len(), tr.postset.len())
    }

    pub(super) fn isomorphic(a: &PetriNet, b: &PetriNet) -> bool {
        if a.num_places() != b.num_places() || a.num_transitions() != b.num_transitions() || a.num_arcs() != b.num_arcs() {
            return false;
        }
        let mut ta: Vec<_> = a.transition_ids().map(|t| trans_sig(a, t)).collect();
        let mut tb: Vec<_> = b.transition_ids().map(|t| trans_sig(b, t)).collect();
        ta.sort();
        tb.sort();
        if ta != tb {
            return false;
        }
        let index = |n: &PetriNet| {
            let mut cons = vec![Vec::new(); n.num_places()];
            let mut prod = vec![Vec::new(); n.num_places()];
            for t in n.transition_ids() {
                for p in &n.transition(t).preset {
                    cons[p.0].push(t);
                }
                for p in &n.transition(t).postset {
                    prod[p.0].push(t);
                }
            }
            (cons, prod)
        };
        let (a_cons, a_prod) = index(a);
        let (b_cons, b_prod) = index(b);
        let mut s = Search {
            a,
            b,
            a_cons,
            b_cons,
            a_prod,
            b_prod,
            pmap: vec![None; a.num_places()],
            pused: vec![false; b.num_places()],
        };
        s.places(0)
    }

    impl Search<'_> {
        fn places(&mut self, i: usize) -> bool {
            if i == self.a.num_places() {
                return self.transitions_match();
            }
            let pa = PlaceIdx(i);
            let sig = place_sig(self.a, &self.a_cons, &self.a_prod, pa);
            for j in 0..self.b.num_places() {
                if self.pused[j] {
                    continue;
                }
                let pb = PlaceIdx(j);
                if place_sig(self.b, &self.b_cons, &self.b_prod, pb) != sig {
                    continue;
                }
                self.pmap[i] = Some(pb);
                self.pused[j] = true;
                if self.places(i + 1) {
                    return true;
                }
                self.pmap[i] = None;
                self.pused[j] = false;
            }
            false
        }

        /// With places fixed, transitions must match as a multiset of
        /// (label, mapped preset, mapped postset).
        fn transitions_match(&self) -> bool {
            let map = |ps: &[PlaceIdx]| {
                let mut v: Vec<PlaceIdx> = ps.iter().map(|p| self.pmap[p.0].unwrap()).collect();
                v.sort();
                v
            };
            let mut ka: Vec<_> = self
                .a
                .transitions()
                .iter()
                .map(|t| (t.label.clone(), map(&t.preset), map(&t.postset)))
                .collect();
            let mut kb: Vec<_> = self
                .b
                .transitions()
                .iter()
                .map(|t| (t.label.clone(), t.preset.clone(), t.postset.clone()))
                .collect();
            ka.sort();
            kb.sort();
            ka == kb
        }
    }
}
