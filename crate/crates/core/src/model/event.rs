use std::collections::{BTreeSet, HashMap};

use super::{Action, ModelError};

/// Identifier of a hash-consed event `⟨a, H⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

impl EventId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Label and strict history of an event. The root event has no label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventData {
    pub label: Option<Action>,
    pub history: BTreeSet<EventId>,
}

impl EventData {
    pub fn is_root(&self) -> bool {
        self.label.is_none()
    }
}

/// Hash-consing table of events.
///
/// Two requests with the same label and history yield the same id. The root
/// event `⊥ = ⟨τ, ∅⟩` is created up front with id 0.
#[derive(Clone, Debug)]
pub struct EventTable {
    events: Vec<EventData>,
    index: HashMap<(Option<Action>, Vec<EventId>), EventId>,
}

impl Default for EventTable {
    fn default() -> Self {
        Self::new()
    }
}

impl EventTable {
    pub const ROOT: EventId = EventId(0);

    pub fn new() -> Self {
        let mut index = HashMap::new();
        index.insert((None, Vec::new()), Self::ROOT);
        EventTable {
            events: vec![EventData {
                label: None,
                history: BTreeSet::new(),
            }],
            index,
        }
    }

    /// Returns the unique event with this label and history.
    ///
    /// The history must contain the root, mention only known events and be
    /// causally closed. Only the root may be unlabelled.
    pub fn mk_event(&mut self, label: Option<Action>, history: BTreeSet<EventId>) -> Result<EventId, ModelError> {
        let key = (label.clone(), history.iter().copied().collect::<Vec<_>>());
        if let Some(&id) = self.index.get(&key) {
            return Ok(id);
        }
        if label.is_none() {
            return Err(ModelError::SilentEvent);
        }
        if !history.contains(&Self::ROOT) {
            return Err(ModelError::NotCausallyClosed);
        }
        for h in &history {
            let data = self.events.get(h.index()).ok_or(ModelError::UnknownEvent(h.0))?;
            if !data.history.is_subset(&history) {
                return Err(ModelError::NotCausallyClosed);
            }
        }
        let id = EventId(self.events.len() as u32);
        self.events.push(EventData { label, history });
        self.index.insert(key, id);
        Ok(id)
    }

    pub fn get(&self, id: EventId) -> &EventData {
        &self.events[id.index()]
    }

    pub fn label(&self, id: EventId) -> Option<&Action> {
        self.events[id.index()].label.as_ref()
    }

    pub fn history(&self, id: EventId) -> &BTreeSet<EventId> {
        &self.events[id.index()].history
    }

    /// `[e] = H ∪ {e}`.
    pub fn causal_past(&self, id: EventId) -> BTreeSet<EventId> {
        let mut past = self.history(id).clone();
        past.insert(id);
        past
    }

    /// `e ≤ f`.
    pub fn leq(&self, e: EventId, f: EventId) -> bool {
        e == f || self.history(f).contains(&e)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}
