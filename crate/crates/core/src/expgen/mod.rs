//! Rediscovery experiments: sample logs from a reference net, mine a net
//! from them and compare the two.

mod generate;
mod report;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ingest::LogFile;
use crate::metrics::{label_independence, LabelPair};
use crate::model::{Action, IndependenceRelation, PetriNet};

pub use generate::{random_block_net, random_negatives};
pub use report::{rediscover, Report, SimOptions, Status};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpgenError {
    #[error("no transition is enabled in the initial marking")]
    DeadlockAtStart,
}

/// Random walks from the initial marking, choosing uniformly among enabled
/// transitions, stopping at a deadlock or after `max_len` steps.
pub fn simulate_log(net: &PetriNet, n_traces: usize, max_len: usize, seed: u64) -> Result<LogFile, ExpgenError> {
    if net.enabled(net.initial_marking()).is_empty() {
        return Err(ExpgenError::DeadlockAtStart);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traces = Vec::with_capacity(n_traces);
    for _ in 0..n_traces {
        let mut m = net.initial_marking().clone();
        let mut trace = Vec::new();
        while trace.len() < max_len {
            let enabled = net.enabled(&m);
            if enabled.is_empty() {
                break;
            }
            let t = enabled[rng.random_range(0..enabled.len())];
            m = net.fire(&m, t).expect("enabled");
            trace.push(net.label(t).clone());
        }
        traces.push(trace);
    }
    Ok(LogFile::new(traces))
}

/// The label pairs an expert would declare independent: natural
/// independence of the reference net, lifted to labels. The flag tells
/// whether labels are injective, which makes the lifting exact.
pub fn reference_independence(net: &PetriNet) -> (BTreeSet<LabelPair>, bool) {
    let labels: BTreeSet<&Action> = net.transitions().iter().map(|t| &t.label).collect();
    (label_independence(net), labels.len() == net.num_transitions())
}

/// Turns label pairs into an independence relation over `alphabet` plus the
/// pair labels.
pub fn to_relation(pairs: &BTreeSet<LabelPair>, alphabet: &crate::model::Alphabet) -> IndependenceRelation {
    let extra = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let mut ind = IndependenceRelation::empty(alphabet.union(&extra));
    for (a, b) in pairs {
        ind.insert(a.clone(), b.clone()).expect("distinct labels");
    }
    ind
}
