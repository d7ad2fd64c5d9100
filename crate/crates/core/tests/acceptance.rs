//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits 0 unless `ACCEPTANCE_STRICT=1` is set, so a failing criterion is
//! reported without stopping the remaining test targets.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use common::oracle::{accepts, brute_min, instances};
use common::*;
use foldmine::cli;
use foldmine::expgen::{random_block_net, random_negatives, rediscover, reference_independence, simulate_log, to_relation, SimOptions, Status};
use foldmine::folding::{fold, is_ip, IpScope};
use foldmine::ingest::{parse_net, LogFile};
use foldmine::metrics::{fitness, precision_proxy};
use foldmine::model::{Action, IndependenceRelation, OccurrenceNet, PetriNet};
use foldmine::semantics::{
    coenabled_events, is_safe, lifted_independence, mazurkiewicz_class, natural_independence, observations_upto, reachable_markings, replay,
    SafetyVerdict, DEFAULT_BUDGET,
};
use foldmine::synth::{
    decode, discover, encode, search_min_transitions, solve_with, DiscoveryOptions, EncodeOptions, FoldClass, Objective, PlaceTarget,
    SearchOptions, SolveConfig, SolveOutcome, SynthError, Verdict,
};
use foldmine::unfolding::build_unfolding;

/// Wall-clock limit for the fixed examples of criteria 1 and 2.
const SMALL_LIMIT: Duration = Duration::from_secs(1);
/// Seeded instances in the property suite.
const SUITE_SEEDS: u64 = 200;
/// Solver budget for each discovery in the property suite.
const SUITE_BUDGET: Duration = Duration::from_secs(2);
/// Share of discoveries that must finish within the budget.
const SUITE_COVERAGE: f64 = 0.95;
const SUITE_LIMIT: Duration = Duration::from_secs(300);
/// Event bound for the exact oracle comparison.
const ORACLE_EVENTS: usize = 8;
const ORACLE_INSTANCES: usize = 150;
/// Per-run limit for every pipeline run.
const RUN_LIMIT: Duration = Duration::from_secs(10);

struct Line {
    pass: bool,
    detail: String,
}

impl Line {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Line { pass, detail: detail.into() }
    }
}

/// Longest single pipeline run seen so far, with its name.
#[derive(Default)]
struct Runs {
    longest: Duration,
    name: String,
}

impl Runs {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let d = start.elapsed();
        if d > self.longest {
            self.longest = d;
            self.name = name.to_string();
        }
        out
    }
}

fn running_example_net() -> PetriNet {
    net("place p1 init 1\nplace p2\nplace p3\nplace p4\nplace p5\nplace p6\n\
         trans a label a\ntrans b1 label b\ntrans b2 label b\ntrans c label c\ntrans d label d\n\
         arc p1 a\narc p1 b2\narc a p2\narc p2 b1\narc b1 p4\narc p4 c\narc c p6\narc b2 p3\narc p3 d\narc d p5\n")
}

fn criterion_1(runs: &mut Runs) -> Line {
    let dir = tempfile::TempDir::new().unwrap();
    let log = dir.path().join("running.log");
    let ind = dir.path().join("empty.ind");
    let out = dir.path().join("beta.net");
    std::fs::write(&log, "a b c\nb d\n").unwrap();
    std::fs::write(&ind, "").unwrap();
    let path = |p: &Path| p.to_str().unwrap().to_string();
    let args = ["foldmine", "unfold", "--log", &path(&log), "--ind", &path(&ind), "-o", &path(&out)].map(String::from);
    let start = Instant::now();
    let code = runs.time("criterion 1 unfold", || cli::run(args, &mut Vec::new(), &mut Vec::new()));
    let elapsed = start.elapsed();
    if code != cli::EXIT_OK {
        return Line::new(false, format!("unfold exited with {code}"));
    }
    let got = parse_net(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let (l, i) = running_example();
    let beta = build_unfolding(&l, &i).unwrap();
    let expected = shapes(&[("init", &["a", "b[]"]), ("a", &["b[a]"]), ("b[]", &["d"]), ("b[a]", &["c"]), ("d", &[]), ("c", &[])]);
    let ok = got.num_transitions() == 5 && got.num_places() == 6 && got.is_isomorphic(&running_example_net()) && condition_shapes(&beta) == expected;
    Line::new(ok && elapsed < SMALL_LIMIT, format!("5 events, 6 conditions, isomorphic={ok}, {elapsed:.2?}"))
}

fn criterion_2(runs: &mut Runs) -> Line {
    let start = Instant::now();
    let (log, ind) = running_example();
    let (r1, r2, obs, n3, ip3) = runs.time("criterion 2 folds", || {
        let beta = build_unfolding(&log, &ind).unwrap();
        let [eq1, eq2, eq3] = running_equivalences(&beta);
        let (n1, n2, n3) = (fold(&beta, &eq1).unwrap(), fold(&beta, &eq2).unwrap(), fold(&beta, &eq3).unwrap());
        let r1 = replay(&n1, &word("b d"), DEFAULT_BUDGET).unwrap().accepted();
        let r2 = log.traces.iter().all(|t| replay(&n2, t, DEFAULT_BUDGET).unwrap().accepted());
        let obs = observations_upto(&n2, 2, DEFAULT_BUDGET).unwrap();
        let ip3 = is_ip(&beta, &eq3, &ind, IpScope::Coe).unwrap();
        (r1, r2, obs, n3, ip3)
    });
    let elapsed = start.elapsed();
    let obs_ok = obs == words(&["", "a", "b", "a a", "a b", "b c", "b d"]);
    let shape3 = (n3.num_transitions(), n3.num_places()) == (4, 4);
    let ok = !r1 && r2 && obs_ok && shape3 && ip3;
    Line::new(
        ok && elapsed < SMALL_LIMIT,
        format!("~1 rejects bd={}, ~2 fits={r2}, ~2 obs<=2 exact={obs_ok}, ~3 4T/4P={shape3} ip={ip3}, {elapsed:.2?}", !r1),
    )
}

fn criterion_3(runs: &mut Runs) -> Line {
    let (log, ind) = log_and_ind("a b\n", "a b\n");
    let accepted = runs.time("criterion 3", || {
        let net = build_unfolding(&log, &ind).unwrap().to_petri_net().net;
        replay(&net, &word("b a"), DEFAULT_BUDGET).unwrap().accepted()
    });
    Line::new(accepted, format!("ba accepted={accepted}"))
}

#[derive(Default)]
struct Suite {
    instances: u64,
    prop2: usize,
    prop3: usize,
    thm1: usize,
    sp_folds: usize,
    sp_unfit: usize,
    ip_folds: usize,
    ip_unsafe: usize,
    ra_folds: usize,
    ra_negatives: usize,
    ra_accepted: usize,
    attempted: usize,
    timeouts: usize,
    other_errors: Vec<String>,
}

fn suite_instance(seed: u64) -> (LogFile, IndependenceRelation, LogFile) {
    let reference = random_block_net(seed, 8);
    let log = simulate_log(&reference, 1 + (seed % 20) as usize, 10, seed).unwrap();
    let ind = to_relation(&reference_independence(&reference).0, &log.alphabet());
    let neg = random_negatives(&log, &ind, seed, 2);
    (log, ind, neg)
}

fn budgeted(class: FoldClass, ra: bool) -> DiscoveryOptions {
    DiscoveryOptions {
        search: SearchOptions {
            class,
            ra,
            solver: SolveConfig { time_budget: Some(SUITE_BUDGET), ..SolveConfig::default() },
            ..SearchOptions::default()
        },
        objective: Objective::MinTransitions,
    }
}

fn criterion_4(runs: &mut Runs) -> Line {
    let start = Instant::now();
    let mut s = Suite::default();
    let none = LogFile::default();
    for seed in 0..SUITE_SEEDS {
        let (log, ind, neg) = suite_instance(seed);
        s.instances += 1;
        runs.time(&format!("criterion 4 seed {seed}"), || {
            let beta = build_unfolding(&log, &ind).unwrap();
            if fitness(&beta.to_petri_net().net, &log, DEFAULT_BUDGET).ratio != 1.0 {
                s.prop2 += 1;
            }
            let occ = beta.to_petri_net();
            let lifted = lifted_independence(&occ.net, &ind);
            let natural = natural_independence(&occ.net);
            for (e, f) in coenabled_events(&beta) {
                let shared = beta.event(e).preset.iter().any(|b| beta.event(f).preset.contains(b));
                if shared != ind.dependent(beta.label(e), beta.label(f)) {
                    s.prop3 += 1;
                }
                let (t, u) = (occ.trans_of[&e], occ.trans_of[&f]);
                let p = (t.min(u), t.max(u));
                if lifted.contains(&p) != natural.contains(&p) {
                    s.thm1 += 1;
                }
            }
            for (class, ra) in [(FoldClass::Sp, false), (FoldClass::Ip, false), (FoldClass::Sp, true)] {
                let negatives = if ra { &neg } else { &none };
                if ra && negatives.is_empty() {
                    continue;
                }
                s.attempted += 1;
                let found = match discover(&log, &ind, negatives, &budgeted(class, ra)) {
                    Ok(found) => found,
                    Err(SynthError::Timeout) => {
                        s.timeouts += 1;
                        continue;
                    }
                    Err(e) => {
                        s.other_errors.push(format!("seed {seed} {class:?} ra={ra}: {e}"));
                        continue;
                    }
                };
                s.sp_folds += 1;
                if fitness(&found.net, &log, DEFAULT_BUDGET).ratio != 1.0 {
                    s.sp_unfit += 1;
                }
                if class == FoldClass::Ip {
                    s.ip_folds += 1;
                    if !matches!(is_safe(&found.net, DEFAULT_BUDGET), SafetyVerdict::Safe) {
                        s.ip_unsafe += 1;
                    }
                }
                if ra {
                    s.ra_folds += 1;
                    for sigma in &negatives.traces {
                        s.ra_negatives += 1;
                        if replay(&found.net, sigma, DEFAULT_BUDGET).map_or(true, |r| r.accepted()) {
                            s.ra_accepted += 1;
                        }
                    }
                }
            }
        });
    }
    let elapsed = start.elapsed();
    let coverage = (s.attempted - s.timeouts) as f64 / s.attempted as f64;
    let violations = s.prop2 + s.prop3 + s.thm1 + s.sp_unfit + s.ip_unsafe + s.ra_accepted;
    let pass = s.instances >= 200 && violations == 0 && s.other_errors.is_empty() && coverage >= SUITE_COVERAGE && elapsed < SUITE_LIMIT;
    let mut detail = format!(
        "{} instances; prop2 {} / prop3 {} / thm1 {} violations; sp fitness<1 {}/{}; ip unsafe {}/{}; ra negatives accepted {}/{} in {} folds; \
         coverage {:.3} ({} timeouts of {}); {:.1?}",
        s.instances,
        s.prop2,
        s.prop3,
        s.thm1,
        s.sp_unfit,
        s.sp_folds,
        s.ip_unsafe,
        s.ip_folds,
        s.ra_accepted,
        s.ra_negatives,
        s.ra_folds,
        coverage,
        s.timeouts,
        s.attempted,
        elapsed
    );
    for e in &s.other_errors {
        detail.push_str(&format!("; {e}"));
    }
    Line::new(pass, detail)
}

fn small_instances() -> Vec<(LogFile, IndependenceRelation, OccurrenceNet)> {
    let mut out = Vec::new();
    for seed in 0..10_000u64 {
        if out.len() >= ORACLE_INSTANCES {
            break;
        }
        let reference = random_block_net(seed, 5);
        let log = simulate_log(&reference, 1 + (seed % 4) as usize, 6, seed).unwrap();
        let ind = to_relation(&reference_independence(&reference).0, &log.alphabet());
        let beta = build_unfolding(&log, &ind).unwrap();
        if beta.num_events() <= ORACLE_EVENTS {
            out.push((log, ind, beta));
        }
    }
    out
}

fn prefix_classes(log: &LogFile, ind: &IndependenceRelation) -> BTreeSet<Vec<Action>> {
    let mut out = BTreeSet::new();
    for t in &log.traces {
        for n in 0..=t.len() {
            out.extend(mazurkiewicz_class(&t[..n], ind, 1_000_000).unwrap());
        }
    }
    out
}

/// Every prefix of every word equivalent to a trace.
fn prefix_closure(log: &LogFile, ind: &IndependenceRelation) -> BTreeSet<Vec<Action>> {
    let mut out = BTreeSet::new();
    for t in &log.traces {
        for w in mazurkiewicz_class(t, ind, 1_000_000).unwrap() {
            for n in 0..=w.len() {
                out.insert(w[..n].to_vec());
            }
        }
    }
    out
}

fn criterion_5(runs: &mut Runs) -> Line {
    let cases = small_instances();
    let (mut obs_bad, mut closure_bad, mut co_bad) = (0, 0, 0);
    let mut example = String::new();
    for (idx, (log, ind, beta)) in cases.iter().enumerate() {
        runs.time(&format!("criterion 5 case {idx}"), || {
            let occ = beta.to_petri_net();
            let obs = observations_upto(&occ.net, beta.num_events(), DEFAULT_BUDGET).unwrap();
            let classes = prefix_classes(log, ind);
            if obs != prefix_closure(log, ind) {
                closure_bad += 1;
            }
            if obs != classes {
                obs_bad += 1;
                if example.is_empty() {
                    let extra = obs.difference(&classes).next().map(|w| w.iter().map(|a| a.name()).collect::<Vec<_>>().join(" "));
                    example = format!("log {:?}, observed beyond classes: {:?}", log.traces.iter().map(|t| t.iter().map(|a| a.name()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>(), extra);
                }
            }
            let mut reach = BTreeSet::new();
            for m in reachable_markings(&occ.net, DEFAULT_BUDGET).unwrap() {
                let en = occ.net.enabled(&m);
                for (i, &t) in en.iter().enumerate() {
                    for &u in &en[i + 1..] {
                        let (e, f) = (occ.events[t.0], occ.events[u.0]);
                        reach.insert((e.min(f), e.max(f)));
                    }
                }
            }
            if coenabled_events(beta) != reach {
                co_bad += 1;
            }
        });
    }
    let mut detail = format!("{} instances; obs != prefix classes on {obs_bad} (prefix-closed classes differ on {closure_bad}); co-enabledness mismatches {co_bad}", cases.len());
    if !example.is_empty() {
        detail.push_str(&format!("; first: {example}"));
    }
    Line::new(obs_bad == 0 && co_bad == 0 && !cases.is_empty(), detail)
}

fn criterion_6(runs: &mut Runs) -> Line {
    let none = BTreeSet::new();
    let cases = instances();
    let (mut kmin_bad, mut perk_bad, mut checks) = (0, 0, 0);
    for (idx, (net, ind)) in cases.iter().enumerate() {
        runs.time(&format!("criterion 6 case {idx}"), || {
            let labels: BTreeSet<_> = net.event_ids().map(|e| net.label(e).clone()).collect();
            for class in [FoldClass::Sp, FoldClass::Ip] {
                let brute = brute_min(net, ind, class);
                let opts = SearchOptions { class, ..SearchOptions::default() };
                let got = search_min_transitions(net, net, ind, &none, &opts).ok().map(|(_, k)| k);
                checks += 1;
                if got != brute {
                    kmin_bad += 1;
                }
                for k in labels.len()..=net.num_events() {
                    let cs = encode(net, net, ind, &none, &EncodeOptions { k: Some(k), class, ..EncodeOptions::default() }).unwrap();
                    let mut verify = |a: &foldmine::synth::Assignment| {
                        if accepts(net, &decode(&cs, a), ind, class) {
                            Verdict::Accept
                        } else {
                            Verdict::Reject
                        }
                    };
                    let sat = matches!(solve_with(&cs, &SolveConfig::default(), &mut verify).0, SolveOutcome::Sat(_));
                    checks += 1;
                    if sat != brute.is_some_and(|m| m <= k) {
                        perk_bad += 1;
                    }
                }
            }
        });
    }
    Line::new(
        kmin_bad == 0 && perk_bad == 0 && !cases.is_empty(),
        format!("{} unfoldings, {checks} checks; k_min mismatches {kmin_bad}; per-k mismatches {perk_bad}", cases.len()),
    )
}

fn criterion_7(runs: &mut Runs) -> Line {
    let sim = SimOptions { traces: 10, max_len: 10, seed: 3 };
    let ip_min = DiscoveryOptions { search: SearchOptions { class: FoldClass::Ip, ..SearchOptions::default() }, objective: Objective::MinTransitions };
    let merge = DiscoveryOptions {
        search: SearchOptions { label_merge: true, ..SearchOptions::default() },
        objective: Objective::Places(PlaceTarget::Max),
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, reference, opts) in [("sequence", sequence(), &ip_min), ("choice", choice(), &ip_min), ("concurrency", concurrency(), &ip_min), ("loop", cycle(), &merge)] {
        let start = Instant::now();
        let report = runs.time(&format!("criterion 7 {name}"), || rediscover(&reference, &sim, opts));
        let elapsed = start.elapsed();
        let (fit, ratios) = match &report {
            Ok(r) if r.status == Status::Mined => {
                let m = r.metrics.as_ref().unwrap();
                (m.fitness.ratio, m.ratios)
            }
            _ => (0.0, None),
        };
        let ok = fit == 1.0 && ratios == Some((1.0, 1.0)) && elapsed < RUN_LIMIT;
        pass &= ok;
        let (rsm, rms) = ratios.unwrap_or((f64::NAN, f64::NAN));
        parts.push(format!("{name} fitness {fit:.2} r_SM {rsm:.2} r_MS {rms:.2} {elapsed:.2?}"));
    }
    Line::new(pass, parts.join("; "))
}

fn flower(log: &LogFile) -> PetriNet {
    let mut text = String::from("place p init 1\n");
    for (i, a) in log.alphabet().iter().enumerate() {
        text.push_str(&format!("trans t{i} label {}\narc p t{i}\narc t{i} p\n", a.name()));
    }
    net(&text)
}

fn criterion_8(runs: &mut Runs) -> Line {
    let (running_log, _) = running_example();
    let logs = [
        ("running example", running_log),
        ("sequence", simulate_log(&sequence(), 5, 10, 1).unwrap()),
        ("choice", simulate_log(&choice(), 5, 10, 1).unwrap()),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, log) in logs {
        let (pf, pc) = runs.time(&format!("criterion 8 {name}"), || {
            let chain = build_unfolding(&log, &IndependenceRelation::empty(log.alphabet())).unwrap().to_petri_net().net;
            (precision_proxy(&flower(&log), &log, DEFAULT_BUDGET).unwrap(), precision_proxy(&chain, &log, DEFAULT_BUDGET).unwrap())
        });
        pass &= pf < pc;
        parts.push(format!("{name} flower {pf:.3} < chain {pc:.3}"));
    }
    Line::new(pass, parts.join("; "))
}

type Criterion = fn(&mut Runs) -> Line;

fn main() {
    let mut runs = Runs::default();
    let criteria: [(&str, Criterion); 8] = [
        ("1 running-example unfolding", criterion_1),
        ("2 example folds", criterion_2),
        ("3 generalization by independence", criterion_3),
        ("4 theorem property suite", criterion_4),
        ("5 oracle equivalence", criterion_5),
        ("6 solver optimality", criterion_6),
        ("7 rediscovery", criterion_7),
        ("8 precision proxy", criterion_8),
    ];
    let mut failed = 0;
    let mut report = |name: &str, line: Line| {
        if !line.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if line.pass { "PASS" } else { "FAIL" }, line.detail);
    };
    for (name, f) in criteria {
        let line = f(&mut runs);
        report(name, line);
    }
    let within = runs.longest < RUN_LIMIT;
    report("9 run time", Line::new(within, format!("longest run {:.2?} ({}), limit {RUN_LIMIT:?}", runs.longest, runs.name)));
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
