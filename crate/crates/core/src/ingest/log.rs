use std::collections::BTreeSet;

use super::{content_lines, IngestError};
use crate::model::{validate_independence, word_to_string, Action, Alphabet, IndependenceRelation};

/// An ordered list of traces. Duplicates are kept.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LogFile {
    pub traces: Vec<Vec<Action>>,
}

impl LogFile {
    pub fn new(traces: Vec<Vec<Action>>) -> Self {
        LogFile { traces }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.traces.iter().flatten().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Distinct traces in first-seen order.
    pub fn distinct(&self) -> Vec<Vec<Action>> {
        let mut seen = BTreeSet::new();
        self.traces.iter().filter(|t| seen.insert(*t)).cloned().collect()
    }
}

pub fn parse_log(text: &str) -> Result<LogFile, IngestError> {
    let mut traces = Vec::new();
    for (line, content) in content_lines(text) {
        let mut trace = Vec::new();
        for tok in content.split_whitespace() {
            let a = Action::new(tok).map_err(|_| IngestError::BadToken {
                line,
                token: tok.to_string(),
            })?;
            trace.push(a);
        }
        traces.push(trace);
    }
    if traces.is_empty() {
        return Err(IngestError::EmptyLog);
    }
    Ok(LogFile { traces })
}

pub fn serialize_log(log: &LogFile) -> String {
    log.traces.iter().map(|t| word_to_string(t) + "\n").collect()
}

pub fn parse_independence(text: &str, alphabet: &Alphabet) -> Result<IndependenceRelation, IngestError> {
    let mut pairs = Vec::new();
    for (line, content) in content_lines(text) {
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(IngestError::MalformedLine { line });
        }
        pairs.push((Action::new(toks[0])?, Action::new(toks[1])?));
    }
    Ok(validate_independence(pairs, alphabet)?)
}

pub fn serialize_independence(rel: &IndependenceRelation) -> String {
    rel.pairs().map(|(a, b)| format!("{a} {b}\n")).collect()
}
