//! Constraint encoding of the folding classes, an internal finite-domain
//! solver, SMT-LIB output, and the optimization searches built on them.

mod encode;
mod search;
mod smtlib;
mod solver;
mod system;

use thiserror::Error;

use crate::folding::FoldError;
use crate::semantics::SemanticsError;
use crate::unfolding::UnfoldError;

pub use encode::{encode, EncodeOptions, FoldClass};
pub use search::{
    decode, discover, search_max_places, search_min_transitions, simplicity, DiscoveryOptions, DiscoveryResult, Measure, Objective,
    PlaceTarget, SearchOptions,
};
pub use smtlib::emit_smtlib;
pub use solver::{solve, solve_with, solve_with_oracle, Oracle, SolveConfig, SolveOutcome, SolveStats, Verdict};
pub use system::{eval, Assignment, Clause, ConstraintSystem, Formulas, Tri, Var, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("transition bound {k} is below the number of distinct labels {labels}")]
    InfeasibleBound { k: usize, labels: usize },
    #[error("no folding equivalence satisfies the constraints")]
    UnsatAll,
    #[error("solver time budget exhausted")]
    Timeout,
    #[error("place fraction {0} is outside (0, 1]")]
    BadFraction(String),
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
}
