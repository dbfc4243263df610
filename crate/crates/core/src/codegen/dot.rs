use std::collections::BTreeSet;
use std::fmt::Write;

use crate::category::{Diagram, SpecKind};
use crate::pushout::PushoutResult;

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn shape(kind: SpecKind) -> &'static str {
    match kind {
        SpecKind::Class => "box",
        SpecKind::AbstractClass => "octagon",
        SpecKind::GenericClass => "box3d",
        SpecKind::BuiltinType => "plaintext",
        SpecKind::Object => "ellipse",
        SpecKind::TypeParameter => "diamond",
        SpecKind::Unit => "circle",
    }
}

/// Graphviz rendering; coprojections of `marked` pushouts are dashed.
pub fn emit_dot(d: &Diagram, marked: &[PushoutResult]) -> String {
    let dashed: BTreeSet<&str> = marked
        .iter()
        .flat_map(|p| [p.left_coproj.name.as_str(), p.right_coproj.name.as_str()])
        .collect();
    let mut out = String::from("digraph dml {\n    node [fontname=\"Helvetica\"];\n");
    for s in d.specs.values() {
        let _ = writeln!(
            out,
            "    {} [label={}, shape={}];",
            quote(&s.name),
            quote(&s.name),
            shape(s.kind)
        );
    }
    for m in d.morphisms.values() {
        let _ = write!(
            out,
            "    {} -> {} [label={}",
            quote(&m.source),
            quote(&m.target),
            quote(&format!("{}: {}", m.name, m.kind))
        );
        if dashed.contains(m.name.as_str()) {
            out.push_str(", style=dashed");
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}
