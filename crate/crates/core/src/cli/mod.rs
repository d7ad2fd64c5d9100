//! Command-line front end. [`run`] parses flags, drives the pipeline and maps
//! outcomes to exit codes; `main` only forwards to it.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::expgen::{reference_independence, simulate_log, ExpgenError};
use crate::folding::{FoldError, IpScope};
use crate::ingest::{
    export_dot, export_dot_occnet, export_pnml, parse_independence, parse_log, parse_net, parse_pnml, serialize_log, serialize_net,
    IngestError, LogFile,
};
use crate::metrics::{excludes_negatives, report, Exclusion};
use crate::model::{parse_word, IndependenceRelation, ModelError, PetriNet};
use crate::semantics::{replay, ReplayOutcome, SemanticsError, DEFAULT_BUDGET};
use crate::synth::{discover, emit_smtlib, DiscoveryOptions, FoldClass, Objective, PlaceTarget, SearchOptions, SolveConfig, SynthError};
use crate::unfolding::{build_unfolding, causal_successors, locate_negative_event, prune_negatives, UnfoldError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSAT: i32 = 3;
pub const EXIT_TIMEOUT: i32 = 4;

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: IngestError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Expgen(#[from] ExpgenError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Synth(SynthError::InfeasibleBound { .. } | SynthError::UnsatAll) => EXIT_UNSAT,
            CliError::Synth(SynthError::Timeout)
            | CliError::Synth(SynthError::Semantics(SemanticsError::BudgetExceeded(_) | SemanticsError::LimitExceeded(_)))
            | CliError::Semantics(SemanticsError::BudgetExceeded(_) | SemanticsError::LimitExceeded(_)) => EXIT_TIMEOUT,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "foldmine", version, about = "Discover Petri nets by unfolding and folding event logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the occurrence net of a log (pruned of negative traces if given).
    Unfold {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        ind: PathBuf,
        #[arg(long)]
        neg: Option<PathBuf>,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Unfold, search for a folding equivalence and write the folded net.
    Discover {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        ind: PathBuf,
        #[arg(long)]
        neg: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ClassArg::Sp)]
        class: ClassArg,
        #[arg(long, value_enum, default_value_t = ScopeArg::Coe)]
        ip_scope: ScopeArg,
        /// Require a removal-aware equivalence for the negative traces.
        #[arg(long)]
        ra: bool,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MinTransitions)]
        objective: ObjectiveArg,
        /// Ask for exactly this fraction of the conditions as places.
        #[arg(long)]
        places_fraction: Option<f64>,
        /// Merge all events of a label into one transition.
        #[arg(long)]
        label_merge: bool,
        /// Upper bound on transitions for the max-places objective.
        #[arg(long)]
        k: Option<usize>,
        /// Allow unsafe IP folds.
        #[arg(long)]
        allow_unsafe: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Solver time budget in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        /// Also write the final constraint system as SMT-LIB.
        #[arg(long)]
        smtlib: Option<PathBuf>,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Decide whether a net can fire a word.
    Replay {
        #[arg(long)]
        net: PathBuf,
        /// Space-separated actions.
        #[arg(long)]
        trace: String,
    },
    /// Report fitness, negative exclusion, independence ratios and precision.
    Metrics {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        neg: Option<PathBuf>,
        /// Reference net for the independence ratios.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        /// Print `key=value` lines instead of a table.
        #[arg(long)]
        kv: bool,
        /// Exit 1 unless fitness is 1 and no negative trace is accepted.
        #[arg(long)]
        assert: bool,
    },
    /// Sample a log by random walks on a net.
    Simulate {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        traces: usize,
        #[arg(long)]
        maxlen: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Convert a net to DOT or PNML.
    Export {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, value_enum)]
        format: FormatArg,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassArg {
    Sp,
    Ip,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScopeArg {
    Coe,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectiveArg {
    MinTransitions,
    MaxPlaces,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Dot,
    Pnml,
}

/// Runs one command line (including the program name) and returns the exit
/// code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_at<T>(path: &Path, r: Result<T, IngestError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn load_log(path: &Path) -> Result<LogFile, CliError> {
    parse_at(path, parse_log(&read(path)?))
}

/// Accepts either the native net format or PNML.
fn load_net(path: &Path) -> Result<PetriNet, CliError> {
    let text = read(path)?;
    if text.trim_start().starts_with('<') {
        parse_at(path, parse_pnml(&text))
    } else {
        parse_at(path, parse_net(&text))
    }
}

/// Reads the positive log, the optional negative log and the independence
/// relation over their joint alphabet.
fn load_inputs(log: &Path, ind: &Path, neg: Option<&Path>) -> Result<(LogFile, LogFile, IndependenceRelation), CliError> {
    let log_file = load_log(log)?;
    let negatives = match neg {
        Some(p) => load_log(p)?,
        None => LogFile::default(),
    };
    let alphabet = log_file.alphabet().union(&negatives.alphabet());
    let rel = parse_at(ind, parse_independence(&read(ind)?, &alphabet))?;
    Ok((log_file, negatives, rel))
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Unfold { log, ind, neg, out: path, dot } => {
            let (log, negatives, ind) = load_inputs(&log, &ind, neg.as_deref())?;
            let mut all = log.clone();
            all.traces.extend(negatives.traces.iter().cloned());
            let mut net = build_unfolding(&all, &ind)?;
            if !negatives.is_empty() {
                let mut neg_events = BTreeSet::new();
                for sigma in &negatives.traces {
                    neg_events.insert(locate_negative_event(&net, sigma, &ind)?);
                }
                warn_extra(err, causal_successors(&net, &neg_events).len());
                net = prune_negatives(&net, &neg_events);
            }
            write(&path, &serialize_net(&net.to_petri_net().net))?;
            if let Some(dot) = dot {
                write(&dot, &export_dot_occnet(&net))?;
            }
            let _ = writeln!(out, "events={} conditions={}", net.num_events(), net.num_conditions());
            Ok(EXIT_OK)
        }
        Command::Discover {
            log,
            ind,
            neg,
            class,
            ip_scope,
            ra,
            objective,
            places_fraction,
            label_merge,
            k,
            allow_unsafe,
            seed,
            timeout,
            smtlib,
            out: path,
        } => {
            let (log, negatives, ind) = load_inputs(&log, &ind, neg.as_deref())?;
            let time_budget = match timeout {
                Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
                Some(s) => return Err(CliError::Usage(format!("invalid --timeout {s}"))),
                None => None,
            };
            let objective = match (objective, places_fraction) {
                (ObjectiveArg::MinTransitions, None) => Objective::MinTransitions,
                (ObjectiveArg::MinTransitions, Some(_)) => {
                    return Err(CliError::Usage("--places-fraction needs --objective max-places".into()));
                }
                (ObjectiveArg::MaxPlaces, None) => Objective::Places(PlaceTarget::Max),
                (ObjectiveArg::MaxPlaces, Some(f)) => Objective::Places(PlaceTarget::Fraction(f)),
            };
            let opts = DiscoveryOptions {
                search: SearchOptions {
                    class: match class {
                        ClassArg::Sp => FoldClass::Sp,
                        ClassArg::Ip => FoldClass::Ip,
                    },
                    ra,
                    ip_scope: match ip_scope {
                        ScopeArg::Coe => IpScope::Coe,
                        ScopeArg::All => IpScope::All,
                    },
                    label_merge,
                    require_safe: !allow_unsafe,
                    k,
                    solver: SolveConfig {
                        seed,
                        time_budget,
                        node_limit: None,
                    },
                },
                objective,
            };
            let result = discover(&log, &ind, &negatives, &opts)?;
            warn_extra(err, result.extra_removed.len());
            write(&path, &serialize_net(&result.net))?;
            if let Some(smt) = smtlib {
                write(&smt, &emit_smtlib(&result.system))?;
            }
            let _ = writeln!(out, "transitions={} places={}", result.net.num_transitions(), result.net.num_places());
            Ok(EXIT_OK)
        }
        Command::Replay { net, trace } => {
            let net = load_net(&net)?;
            let word = parse_word(&trace)?;
            match replay(&net, &word, DEFAULT_BUDGET)? {
                ReplayOutcome::Accept { .. } => {
                    let _ = writeln!(out, "Accept");
                    Ok(EXIT_OK)
                }
                ReplayOutcome::Reject { failure_index } => {
                    let _ = writeln!(out, "Reject at {failure_index}");
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Metrics {
            net,
            log,
            neg,
            reference,
            kv,
            assert,
        } => {
            let net = load_net(&net)?;
            let log = load_log(&log)?;
            let negatives = neg.as_deref().map(load_log).transpose()?;
            let reference = match reference {
                Some(p) => Some(reference_independence(&load_net(&p)?).0),
                None => None,
            };
            let rep = report(&net, &log, negatives.as_ref(), reference.as_ref(), DEFAULT_BUDGET);
            let _ = out.write_all(if kv { rep.to_kv() } else { rep.to_table() }.as_bytes());
            let negatives_ok = negatives.as_ref().is_none_or(|n| excludes_negatives(&net, n, DEFAULT_BUDGET) == Exclusion::Excluded);
            if assert && (rep.fitness.ratio < 1.0 || !negatives_ok) {
                let _ = writeln!(err, "assertion failed: fitness below 1 or a negative trace accepted");
                return Ok(EXIT_NEGATIVE);
            }
            Ok(EXIT_OK)
        }
        Command::Simulate {
            net,
            traces,
            maxlen,
            seed,
            out: path,
        } => {
            let net = load_net(&net)?;
            let log = simulate_log(&net, traces, maxlen, seed)?;
            write(&path, &serialize_log(&log))?;
            Ok(EXIT_OK)
        }
        Command::Export { net, format, out: path } => {
            let net = load_net(&net)?;
            let text = match format {
                FormatArg::Dot => export_dot(&net),
                FormatArg::Pnml => export_pnml(&net),
            };
            write(&path, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn warn_extra(err: &mut dyn Write, n: usize) {
    if n > 0 {
        let _ = writeln!(err, "warning: removed {n} event(s) lying above a negative event");
    }
}
