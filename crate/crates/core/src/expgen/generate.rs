use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::LogFile;
use crate::model::{Action, IndependenceRelation, PetriNet, PlaceIdx};
use crate::semantics::{replay, DEFAULT_BUDGET};
use crate::unfolding::{build_unfolding, locate_negative_event};

struct Builder<'r> {
    net: PetriNet,
    rng: &'r mut ChaCha8Rng,
    next_label: usize,
}

impl Builder<'_> {
    fn place(&mut self) -> PlaceIdx {
        let n = self.net.num_places();
        self.net.add_place(format!("p{n}"), 0)
    }

    fn transition(&mut self, from: &[PlaceIdx], to: &[PlaceIdx]) {
        let i = self.next_label;
        self.next_label += 1;
        let name = if i < 26 { ((b'a' + i as u8) as char).to_string() } else { format!("x{i}") };
        let t = self.net.add_transition(format!("t{i}"), Action::new(&name).expect("valid name"));
        for &p in from {
            self.net.add_input_arc(p, t);
        }
        for &p in to {
            self.net.add_output_arc(t, p);
        }
    }

    fn split(&mut self, budget: usize) -> (usize, usize) {
        let left = self.rng.random_range(1..budget);
        (left, budget - left)
    }

    /// Adds a block from `entry` to `exit` with exactly `budget` transitions.
    fn block(&mut self, entry: PlaceIdx, exit: PlaceIdx, budget: usize) {
        if budget == 1 {
            self.transition(&[entry], &[exit]);
            return;
        }
        let kinds = if budget >= 4 { 4 } else { 3 };
        match self.rng.random_range(0..kinds) {
            0 => {
                let (l, r) = self.split(budget);
                let mid = self.place();
                self.block(entry, mid, l);
                self.block(mid, exit, r);
            }
            1 => {
                let (l, r) = self.split(budget);
                self.block(entry, exit, l);
                self.block(entry, exit, r);
            }
            2 => {
                let (l, r) = self.split(budget);
                self.block(entry, exit, l);
                self.block(exit, entry, r);
            }
            _ => {
                let (l, r) = self.split(budget - 2);
                let [a, b, c, d] = [self.place(), self.place(), self.place(), self.place()];
                self.transition(&[entry], &[a, b]);
                self.block(a, c, l);
                self.block(b, d, r);
                self.transition(&[c, d], &[exit]);
            }
        }
    }
}

/// A random block-structured net (sequence, exclusive choice, loop and
/// fork/join blocks) with between 1 and `max_transitions` injectively
/// labelled transitions.
pub fn random_block_net(seed: u64, max_transitions: usize) -> PetriNet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = rng.random_range(1..=max_transitions.max(1));
    let mut b = Builder {
        net: PetriNet::new(format!("random{seed}")),
        rng: &mut rng,
        next_label: 0,
    };
    let start = b.place();
    let end = b.place();
    b.net.set_initial(start, 1);
    b.block(start, end, budget);
    b.net
}

/// Up to `count` negative traces: a prefix of a log trace extended by one
/// label, kept only if the unfolding of the log cannot replay it and its
/// last event accounts for the whole trace.
pub fn random_negatives(log: &LogFile, ind: &IndependenceRelation, seed: u64, count: usize) -> LogFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<Action> = log.alphabet().iter().cloned().collect();
    let mut out: Vec<Vec<Action>> = Vec::new();
    let Ok(beta) = build_unfolding(log, ind) else {
        return LogFile::default();
    };
    let traces: Vec<&Vec<Action>> = log.traces.iter().collect();
    if labels.is_empty() || traces.is_empty() {
        return LogFile::default();
    }
    for _ in 0..count * 8 {
        if out.len() >= count {
            break;
        }
        let t = traces[rng.random_range(0..traces.len())];
        let cut = rng.random_range(0..=t.len());
        let mut sigma = t[..cut].to_vec();
        sigma.push(labels[rng.random_range(0..labels.len())].clone());
        if out.contains(&sigma) || !matches!(replay(&beta.to_petri_net().net, &sigma, DEFAULT_BUDGET), Ok(r) if !r.accepted()) {
            continue;
        }
        let mut all = log.clone();
        all.traces.extend(out.iter().cloned());
        all.traces.push(sigma.clone());
        let Ok(full) = build_unfolding(&all, ind) else { continue };
        if locate_negative_event(&full, &sigma, ind).is_ok() {
            out.push(sigma);
        }
    }
    LogFile::new(out)
}
