use std::collections::BTreeSet;

use super::{Action, Alphabet, ModelError};

/// A symmetric, irreflexive independence relation over an alphabet.
///
/// Pairs are stored once as `(min, max)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceRelation {
    alphabet: Alphabet,
    pairs: BTreeSet<(Action, Action)>,
}

/// Checks a list of pairs against an alphabet and builds the relation.
///
/// Symmetric duplicates collapse into one pair.
pub fn validate_independence<I>(pairs: I, alphabet: &Alphabet) -> Result<IndependenceRelation, ModelError>
where
    I: IntoIterator<Item = (Action, Action)>,
{
    let mut rel = IndependenceRelation::empty(alphabet.clone());
    for (a, b) in pairs {
        rel.insert(a, b)?;
    }
    Ok(rel)
}

impl IndependenceRelation {
    pub fn empty(alphabet: Alphabet) -> Self {
        IndependenceRelation {
            alphabet,
            pairs: BTreeSet::new(),
        }
    }

    pub fn insert(&mut self, a: Action, b: Action) -> Result<(), ModelError> {
        for x in [&a, &b] {
            if !self.alphabet.contains(x) {
                return Err(ModelError::UnknownAction(x.to_string()));
            }
        }
        if a == b {
            return Err(ModelError::ReflexivePair(a.to_string()));
        }
        self.pairs.insert(ordered(a, b));
        Ok(())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Returns a copy with a larger alphabet. Added actions depend on everything.
    pub fn with_alphabet(&self, extra: &Alphabet) -> Self {
        IndependenceRelation {
            alphabet: self.alphabet.union(extra),
            pairs: self.pairs.clone(),
        }
    }

    pub fn independent(&self, a: &Action, b: &Action) -> bool {
        if a < b {
            self.pairs.contains(&(a.clone(), b.clone()))
        } else {
            self.pairs.contains(&(b.clone(), a.clone()))
        }
    }

    pub fn dependent(&self, a: &Action, b: &Action) -> bool {
        !self.independent(a, b)
    }

    /// Dependence on optional labels; `None` stands for the silent root label,
    /// which depends on everything.
    pub fn labels_dependent(&self, a: Option<&Action>, b: Option<&Action>) -> bool {
        match (a, b) {
            (Some(a), Some(b)) => self.dependent(a, b),
            _ => true,
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Action, Action)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub(crate) fn ordered(a: Action, b: Action) -> (Action, Action) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
