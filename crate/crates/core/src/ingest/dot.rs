use std::fmt::Write as _;

use crate::model::{OccurrenceNet, PetriNet};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Places as circles with their token count, transitions as boxes with their
/// label. One node statement per place and per transition.
pub fn export_dot(net: &PetriNet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph {} {{", quote(&net.name));
    let _ = writeln!(s, "  rankdir=LR;");
    for p in net.place_ids() {
        let name = &net.place(p).name;
        let tokens = net.initial_marking().get(p);
        let label = if tokens == 0 { String::new() } else { tokens.to_string() };
        let _ = writeln!(s, "  {} [shape=circle, xlabel={}, label={}];", quote(name), quote(name), quote(&label));
    }
    for t in net.transitions() {
        let _ = writeln!(s, "  {} [shape=box, label={}];", quote(&t.name), quote(t.label.name()));
    }
    for t in net.transitions() {
        for p in &t.preset {
            let _ = writeln!(s, "  {} -> {};", quote(&net.place(*p).name), quote(&t.name));
        }
        for p in &t.postset {
            let _ = writeln!(s, "  {} -> {};", quote(&t.name), quote(&net.place(*p).name));
        }
    }
    s.push_str("}\n");
    s
}

/// Conditions as circles (`b<id>`, one token if initial), events as boxes
/// (`e<id>`).
pub fn export_dot_occnet(net: &OccurrenceNet) -> String {
    export_dot(&net.to_petri_net().net)
}
