use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::ModelError;

/// An observable action name.
///
/// Equality, ordering and hashing go through the name, so two actions built
/// from the same string are interchangeable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(Arc<str>);

impl Action {
    /// Builds an action, rejecting empty names and names with whitespace or `#`.
    pub fn new(name: &str) -> Result<Self, ModelError> {
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '#') {
            return Err(ModelError::InvalidActionName(name.to_string()));
        }
        Ok(Action(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Parses a whitespace separated word into actions.
pub fn parse_word(text: &str) -> Result<Vec<Action>, ModelError> {
    text.split_whitespace().map(Action::new).collect()
}

/// Renders a word with single spaces.
pub fn word_to_string(word: &[Action]) -> String {
    word.iter().map(Action::name).collect::<Vec<_>>().join(" ")
}

/// A finite set of actions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    actions: BTreeSet<Action>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Action) -> bool {
        self.actions.insert(a)
    }

    pub fn contains(&self, a: &Action) -> bool {
        self.actions.contains(a)
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Action> {
        self.actions.iter()
    }

    pub fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet {
            actions: self.actions.union(&other.actions).cloned().collect(),
        }
    }
}

impl FromIterator<Action> for Alphabet {
    fn from_iter<I: IntoIterator<Item = Action>>(iter: I) -> Self {
        Alphabet {
            actions: iter.into_iter().collect(),
        }
    }
}
