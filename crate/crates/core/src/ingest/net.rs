use std::collections::HashMap;
use std::fmt::Write as _;

use super::{content_lines, IngestError};
use crate::model::{Action, PetriNet, PlaceIdx, TransIdx};

enum Node {
    Place(PlaceIdx),
    Trans(TransIdx),
}

/// Parses the line-oriented net format:
///
/// ```text
/// net NAME
/// place ID [init N]
/// trans ID label ACTION
/// arc SRC DST
/// ```
pub fn parse_net(text: &str) -> Result<PetriNet, IngestError> {
    let mut net = PetriNet::new("net");
    let mut ids: HashMap<String, Node> = HashMap::new();
    for (line, content) in content_lines(text) {
        let toks: Vec<&str> = content.split_whitespace().collect();
        let malformed = || IngestError::MalformedLine { line };
        match toks[0] {
            "net" => {
                if toks.len() != 2 {
                    return Err(malformed());
                }
                net.name = toks[1].to_string();
            }
            "place" => {
                let tokens = match toks.len() {
                    2 => 0,
                    4 if toks[2] == "init" => toks[3].parse::<u32>().map_err(|_| malformed())?,
                    _ => return Err(malformed()),
                };
                let id = toks[1];
                if ids.contains_key(id) {
                    return Err(IngestError::DuplicateId { line, id: id.into() });
                }
                ids.insert(id.into(), Node::Place(net.add_place(id, tokens)));
            }
            "trans" => {
                if toks.len() < 2 {
                    return Err(malformed());
                }
                let id = toks[1];
                if toks.len() == 2 || (toks.len() == 3 && toks[2] == "label") {
                    return Err(IngestError::MissingLabel { line, id: id.into() });
                }
                if toks.len() != 4 || toks[2] != "label" {
                    return Err(malformed());
                }
                if ids.contains_key(id) {
                    return Err(IngestError::DuplicateId { line, id: id.into() });
                }
                let label = Action::new(toks[3])?;
                ids.insert(id.into(), Node::Trans(net.add_transition(id, label)));
            }
            "arc" => {
                if toks.len() != 3 {
                    return Err(malformed());
                }
                let lookup = |id: &str| {
                    ids.get(id).ok_or_else(|| IngestError::UnknownNode { line, id: id.into() })
                };
                match (lookup(toks[1])?, lookup(toks[2])?) {
                    (Node::Place(p), Node::Trans(t)) => net.add_input_arc(*p, *t),
                    (Node::Trans(t), Node::Place(p)) => net.add_output_arc(*t, *p),
                    _ => return Err(IngestError::ArcTypeError { line }),
                }
            }
            _ => return Err(malformed()),
        }
    }
    Ok(net)
}

/// Canonical text: places, then transitions, then arcs grouped per transition
/// (inputs before outputs, each sorted by place index).
pub fn serialize_net(net: &PetriNet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "net {}", net.name);
    for p in net.place_ids() {
        let name = &net.place(p).name;
        match net.initial_marking().get(p) {
            0 => {
                let _ = writeln!(s, "place {name}");
            }
            n => {
                let _ = writeln!(s, "place {name} init {n}");
            }
        }
    }
    for t in net.transitions() {
        let _ = writeln!(s, "trans {} label {}", t.name, t.label);
    }
    for t in net.transitions() {
        for p in &t.preset {
            let _ = writeln!(s, "arc {} {}", net.place(*p).name, t.name);
        }
        for p in &t.postset {
            let _ = writeln!(s, "arc {} {}", t.name, net.place(*p).name);
        }
    }
    s
}
