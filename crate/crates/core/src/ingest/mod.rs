//! Text formats: logs, independence relations, nets, plus DOT and PNML export.

mod dot;
mod log;
mod net;
mod pnml;

use thiserror::Error;

use crate::model::ModelError;

pub use dot::{export_dot, export_dot_occnet};
pub use log::{parse_independence, parse_log, serialize_independence, serialize_log, LogFile};
pub use net::{parse_net, serialize_net};
pub use pnml::{export_pnml, parse_pnml};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("log contains no traces")]
    EmptyLog,
    #[error("line {line}: bad token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: malformed line")]
    MalformedLine { line: usize },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: arc must connect a place and a transition")]
    ArcTypeError { line: usize },
    #[error("line {line}: unknown node {id}")]
    UnknownNode { line: usize, id: String },
    #[error("line {line}: transition {id} has no label")]
    MissingLabel { line: usize, id: String },
    #[error("pnml: {0}")]
    Pnml(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Yields `(1-based line number, trimmed content)` for lines that are neither
/// blank nor comments. Handles CRLF.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}
