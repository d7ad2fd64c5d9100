//! Process discovery by unfolding an event log under an independence relation
//! and folding the resulting occurrence net into a Petri net.

pub mod model;
pub mod ingest;
pub mod unfolding;
pub mod semantics;
pub mod folding;
pub mod synth;
pub mod metrics;
pub mod expgen;
pub mod cli;
