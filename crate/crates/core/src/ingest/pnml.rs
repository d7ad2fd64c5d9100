use std::collections::HashMap;
use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::IngestError;
use crate::model::{Action, PetriNet};

const PT_TYPE: &str = "http://www.pnml.org/version-2009/grammar/ptnet";

/// A single `<net>` without pages. `<initialMarking>` is omitted for empty
/// places.
pub fn export_pnml(net: &PetriNet) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<pnml>\n");
    let _ = writeln!(s, "  <net id=\"{}\" type=\"{PT_TYPE}\">", escape(net.name.as_str()));
    for p in net.place_ids() {
        let name = escape(net.place(p).name.as_str());
        let _ = write!(s, "    <place id=\"{name}\"><name><text>{name}</text></name>");
        let tokens = net.initial_marking().get(p);
        if tokens > 0 {
            let _ = write!(s, "<initialMarking><text>{tokens}</text></initialMarking>");
        }
        s.push_str("</place>\n");
    }
    for t in net.transitions() {
        let _ = writeln!(
            s,
            "    <transition id=\"{}\"><name><text>{}</text></name></transition>",
            escape(t.name.as_str()),
            escape(t.label.name())
        );
    }
    let mut arc = 0;
    for t in net.transitions() {
        let tn = escape(t.name.as_str());
        for p in &t.preset {
            let _ = writeln!(s, "    <arc id=\"a{arc}\" source=\"{}\" target=\"{tn}\"/>", escape(net.place(*p).name.as_str()));
            arc += 1;
        }
        for p in &t.postset {
            let _ = writeln!(s, "    <arc id=\"a{arc}\" source=\"{tn}\" target=\"{}\"/>", escape(net.place(*p).name.as_str()));
            arc += 1;
        }
    }
    s.push_str("  </net>\n</pnml>\n");
    s
}

fn err(msg: impl Into<String>) -> IngestError {
    IngestError::Pnml(msg.into())
}

fn attr(e: &BytesStart, key: &[u8]) -> Result<Option<String>, IngestError> {
    for a in e.attributes() {
        let a = a.map_err(|x| err(x.to_string()))?;
        if a.key.as_ref() == key {
            return Ok(Some(a.unescape_value().map_err(|x| err(x.to_string()))?.into_owned()));
        }
    }
    Ok(None)
}

#[derive(Default)]
struct Pending {
    places: Vec<(String, u32)>,
    transitions: Vec<(String, Option<String>)>,
    arcs: Vec<(String, String)>,
    name: Option<String>,
}

/// Reads the subset written by [`export_pnml`]. Pages are tolerated and
/// flattened; unknown elements are ignored.
pub fn parse_pnml(text: &str) -> Result<PetriNet, IngestError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);
    let mut stack: Vec<String> = Vec::new();
    let mut pending = Pending::default();
    loop {
        let ev = reader.read_event().map_err(|e| err(e.to_string()))?;
        match ev {
            Event::Start(e) => {
                let tag = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                open(&tag, &e, &mut pending)?;
                stack.push(tag);
            }
            Event::Empty(e) => {
                let tag = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                open(&tag, &e, &mut pending)?;
            }
            Event::End(_) => {
                stack.pop();
            }
            Event::Text(t) => {
                let value = t.unescape().map_err(|e| err(e.to_string()))?.trim().to_string();
                let n = stack.len();
                if n >= 3 && stack[n - 1] == "text" {
                    match (stack[n - 3].as_str(), stack[n - 2].as_str()) {
                        ("place", "initialMarking") => {
                            let tokens = value.parse::<u32>().map_err(|_| err(format!("bad marking {value:?}")))?;
                            if let Some(p) = pending.places.last_mut() {
                                p.1 = tokens;
                            }
                        }
                        ("transition", "name") => {
                            if let Some(t) = pending.transitions.last_mut() {
                                t.1 = Some(value);
                            }
                        }
                        _ => {}
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    build(pending)
}

fn open(tag: &str, e: &BytesStart, pending: &mut Pending) -> Result<(), IngestError> {
    let id = || attr(e, b"id")?.ok_or_else(|| err(format!("<{tag}> without id")));
    match tag {
        "net" => pending.name = attr(e, b"id")?,
        "place" => pending.places.push((id()?, 0)),
        "transition" => pending.transitions.push((id()?, None)),
        "arc" => {
            let src = attr(e, b"source")?.ok_or_else(|| err("arc without source"))?;
            let dst = attr(e, b"target")?.ok_or_else(|| err("arc without target"))?;
            pending.arcs.push((src, dst));
        }
        _ => {}
    }
    Ok(())
}

fn build(pending: Pending) -> Result<PetriNet, IngestError> {
    let mut net = PetriNet::new(pending.name.unwrap_or_else(|| "net".into()));
    let mut places = HashMap::new();
    let mut trans = HashMap::new();
    for (id, tokens) in pending.places {
        if places.contains_key(&id) {
            return Err(IngestError::DuplicateId { line: 0, id });
        }
        let p = net.add_place(id.clone(), tokens);
        places.insert(id, p);
    }
    for (id, label) in pending.transitions {
        if places.contains_key(&id) || trans.contains_key(&id) {
            return Err(IngestError::DuplicateId { line: 0, id });
        }
        let label = label.ok_or_else(|| IngestError::MissingLabel { line: 0, id: id.clone() })?;
        let t = net.add_transition(id.clone(), Action::new(&label)?);
        trans.insert(id, t);
    }
    for (src, dst) in pending.arcs {
        match (places.get(&src), trans.get(&src), places.get(&dst), trans.get(&dst)) {
            (Some(p), _, _, Some(t)) => net.add_input_arc(*p, *t),
            (_, Some(t), Some(p), _) => net.add_output_arc(*t, *p),
            (None, None, _, _) => return Err(IngestError::UnknownNode { line: 0, id: src }),
            (_, _, None, None) => return Err(IngestError::UnknownNode { line: 0, id: dst }),
            _ => return Err(IngestError::ArcTypeError { line: 0 }),
        }
    }
    Ok(net)
}
