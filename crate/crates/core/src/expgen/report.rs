use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::{reference_independence, simulate_log, to_relation, ExpgenError};
use crate::folding::{is_ip, is_ra, is_sp};
use crate::ingest::{serialize_independence, serialize_log, serialize_net, LogFile};
use crate::metrics::{self, MetricsReport};
use crate::model::PetriNet;
use crate::semantics::DEFAULT_BUDGET;
use crate::synth::{discover, DiscoveryOptions, FoldClass, SynthError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimOptions {
    pub traces: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            traces: 20,
            max_len: 30,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Mined,
    UnsatAll,
    Timeout,
    Failed(String),
}

/// Outcome of one rediscovery run.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub sim: SimOptions,
    pub reference_digest: String,
    pub log_digest: String,
    pub independence_digest: String,
    /// The sampled log, verbatim.
    pub log: String,
    pub independence: String,
    pub injective: bool,
    pub status: Status,
    pub mined: Option<PetriNet>,
    /// Whether the mined equivalence passes the requested class checks.
    pub class_ok: Option<bool>,
    pub metrics: Option<MetricsReport>,
}

fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Samples a log from `reference`, mines a net from it with the reference's
/// own independence, and measures the result against both.
pub fn rediscover(reference: &PetriNet, sim: &SimOptions, opts: &DiscoveryOptions) -> Result<Report, ExpgenError> {
    let log = simulate_log(reference, sim.traces, sim.max_len, sim.seed)?;
    let (pairs, injective) = reference_independence(reference);
    let ind = to_relation(&pairs, &log.alphabet());
    let log_text = serialize_log(&log);
    let ind_text = serialize_independence(&ind);
    let mut report = Report {
        sim: *sim,
        reference_digest: digest(&serialize_net(reference)),
        log_digest: digest(&log_text),
        independence_digest: digest(&ind_text),
        log: log_text,
        independence: ind_text,
        injective,
        status: Status::Mined,
        mined: None,
        class_ok: None,
        metrics: None,
    };
    match discover(&log, &ind, &LogFile::default(), opts) {
        Ok(res) => {
            let s = &opts.search;
            let class_ok = match s.class {
                FoldClass::Sp => is_sp(&res.star, &res.equivalence),
                FoldClass::Ip => is_ip(&res.star, &res.equivalence, &ind, s.ip_scope).unwrap_or(false),
            } && (!s.ra || is_ra(&res.full, &res.star, &res.equivalence, &res.neg_events));
            report.class_ok = Some(class_ok);
            report.metrics = Some(metrics::report(&res.net, &log, None, Some(&pairs), DEFAULT_BUDGET));
            report.mined = Some(res.net);
        }
        Err(SynthError::UnsatAll) => report.status = Status::UnsatAll,
        Err(SynthError::Timeout) => report.status = Status::Timeout,
        Err(e) => report.status = Status::Failed(e.to_string()),
    }
    Ok(report)
}

impl Report {
    /// Sectioned `key=value` text. Identical inputs give identical bytes.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[inputs]");
        let _ = writeln!(s, "seed={}", self.sim.seed);
        let _ = writeln!(s, "traces={}", self.sim.traces);
        let _ = writeln!(s, "max_len={}", self.sim.max_len);
        let _ = writeln!(s, "reference_sha256={}", self.reference_digest);
        let _ = writeln!(s, "log_sha256={}", self.log_digest);
        let _ = writeln!(s, "independence_sha256={}", self.independence_digest);
        let _ = writeln!(s, "injective_labels={}", self.injective);
        let status = match &self.status {
            Status::Mined => "mined".to_string(),
            Status::UnsatAll => "unsat_all".to_string(),
            Status::Timeout => "timeout".to_string(),
            Status::Failed(e) => format!("failed: {e}"),
        };
        let _ = writeln!(s, "\n[result]\nstatus={status}");
        if let Some(ok) = self.class_ok {
            let _ = writeln!(s, "class_ok={ok}");
        }
        if let Some(m) = &self.metrics {
            let _ = write!(s, "\n[metrics]\n{}", m.to_kv());
        }
        let _ = write!(s, "\n[log]\n{}", self.log);
        let _ = write!(s, "\n[independence]\n{}", self.independence);
        if let Some(net) = &self.mined {
            let _ = write!(s, "\n[mined_net]\n{}", serialize_net(net));
        }
        s
    }
}
