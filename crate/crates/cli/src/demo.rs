use std::path::Path as FsPath;

use dml_core::codegen::{emit_dot, emit_skeleton, topological_order, Dialect};
use dml_core::constructs::{classify_pushout, object_construction, structural_diff};
use dml_core::graph::{parameter_passing, PlainGraph};
use dml_core::pushout::{coprojection_decomposition, Leg};
use dml_core::{compute_pushout, corpus, dsl, recognize_pushout, Diagram, SpecKind};

use crate::commands::{declared_cone, marked_pushouts, verify_cone, write_skeleton};
use crate::{Context, Failure, Report};

/// Demo names and the bundled file each one runs.
pub const DEMOS: &[(&str, &str)] = &[
    ("linbox-copy", "linbox_copy.dml"),
    ("linbox-inherit", "linbox_inherit.dml"),
    ("virtual-inheritance", "virtual_inheritance.dml"),
    ("polymorphism", "polymorphism.dml"),
    ("template", "template.dml"),
    ("parameter-passing", "parameter_passing.dml"),
    ("envelope-java", "envelope_java.dml"),
];

fn bundled(file: &str) -> Result<Diagram, Failure> {
    let text = corpus::get(file)
        .ok_or_else(|| Failure::domain("UnknownEntity", format!("no bundled file `{file}`")))?;
    Ok(dsl::parse(text)?)
}

fn pushouts(r: &mut Report, d: &Diagram) -> Result<(), Failure> {
    for (name, decl) in &d.pushouts {
        let cone = declared_cone(d, name)?;
        r.kv("pushout.vertex", &decl.vertex);
        if !verify_cone(r, d, name, &cone)? {
            continue;
        }
        let p = recognize_pushout(d, &cone).map_err(|e| Failure::domain(e.code(), e))?;
        let pattern = classify_pushout(d, &p).map_err(|e| Failure::domain(e.code(), e))?;
        r.line(format!("  pattern: {}", pattern.tag));
        r.kv("pattern.tag", pattern.tag);
        r.kv(format!("pattern.{name}"), pattern.tag);
        for side in [Leg::Left, Leg::Right] {
            let steps = coprojection_decomposition(d, &cone, side)
                .map_err(|e| Failure::domain(e.code(), e))?;
            if steps.len() < 2 {
                continue;
            }
            let kinds: Vec<&str> = steps.iter().map(|(_, k)| k.as_str()).collect();
            let coproj = cone.coproj(side);
            r.line(format!("  {coproj} mirrors {}", kinds.join(" then ")));
            r.kv(format!("coprojection.{coproj}.kinds"), kinds.join(","));
        }
    }
    Ok(())
}

fn objects(r: &mut Report, d: &Diagram) {
    for name in topological_order(d) {
        if d.specs[&name].kind != SpecKind::Object {
            continue;
        }
        if let Ok(c) = object_construction(d, &name) {
            r.line(format!("  object {name}: {c}"));
            r.kv(format!("object.{name}"), c);
        }
    }
}

fn virtual_inheritance(r: &mut Report, d: &Diagram) -> Result<(), Failure> {
    let span = d
        .find_span("Z")
        .ok_or_else(|| Failure::domain("UnknownEntity", "no span `Z`"))?;
    let p = compute_pushout(d, span, "Z~computed").map_err(|e| Failure::domain(e.code(), e))?;
    let members: Vec<&str> = p.vertex.member_names().collect();
    r.line(format!(
        "  computed vertex members: {{{}}}",
        members.join(", ")
    ));
    r.kv("computed.members", members.join(","));
    let declared: Vec<&str> = d.specs["Z"].member_names().collect();
    r.kv("declared.members", declared.join(","));
    Ok(())
}

fn parameter(r: &mut Report, d: &Diagram) -> Result<(), Failure> {
    let edge = |name: &str| -> Result<PlainGraph, Failure> {
        let m = d
            .morphisms
            .get(name)
            .ok_or_else(|| Failure::domain("UnknownEntity", format!("no morphism `{name}`")))?;
        Ok(PlainGraph::new(name).with_edge(name, &m.source, &m.target))
    };
    let (fa, glued) = parameter_passing(&edge("f")?, "f", &edge("a")?, "a")
        .map_err(|e| Failure::domain(e.code(), e))?;
    r.line(format!(
        "  glued graph: {} nodes, {} edges; composite {}: {} -> {}",
        glued.graph.nodes.len(),
        glued.graph.edges.len(),
        fa.label,
        fa.source,
        fa.target
    ));
    r.kv("parameter.label", &fa.label);
    r.kv("parameter.source", &fa.source);
    r.kv("parameter.target", &fa.target);
    r.kv("parameter.edges", glued.graph.edges.len());
    let (gfa, _) = parameter_passing(&edge("g")?, "g", &fa.as_graph("fa"), &fa.label)
        .map_err(|e| Failure::domain(e.code(), e))?;
    r.line(format!(
        "  chained: {}: {} -> {}",
        gfa.label, gfa.source, gfa.target
    ));
    r.kv("parameter.chained", &gfa.label);
    Ok(())
}

fn diff(r: &mut Report, d: &Diagram) -> Result<(), Failure> {
    let base = bundled("linbox_copy.dml")?;
    let items = structural_diff(&base, d);
    r.line(format!("  {} difference(s) from linbox-copy:", items.len()));
    for item in &items {
        r.line(format!("    {item}"));
        r.kv("diff.item", item);
    }
    r.kv("diff.count", items.len());
    Ok(())
}

pub(crate) fn run(
    r: &mut Report,
    _ctx: &Context,
    name: &str,
    out: Option<&FsPath>,
) -> Result<(), Failure> {
    let file = DEMOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| *f)
        .ok_or_else(|| Failure::domain("UnknownEntity", format!("no demo `{name}`")))?;
    let d = bundled(file)?;
    r.kv("demo", name);
    r.good(&format!(
        "{file}: {} specifications, {} morphisms, {} pushouts",
        d.specs.len(),
        d.morphisms.len(),
        d.pushouts.len()
    ));
    pushouts(r, &d)?;
    objects(r, &d);
    match name {
        "virtual-inheritance" => virtual_inheritance(r, &d)?,
        "parameter-passing" => parameter(r, &d)?,
        "linbox-inherit" => diff(r, &d)?,
        _ => {}
    }

    let marked = marked_pushouts(&d);
    let dot = emit_dot(&d, &marked);
    for dialect in [Dialect::Curly, Dialect::Interface] {
        match out {
            Some(dir) => {
                write_skeleton(r, &d, dialect, &dir.join(dialect.as_str()))?;
            }
            None => {
                let sk = emit_skeleton(&d, dialect).map_err(|e| Failure::domain(e.code(), e))?;
                r.line(format!(
                    "  {dialect}: {} unit(s), {} unsupported",
                    sk.units.len(),
                    sk.unsupported.len()
                ));
                r.kv(format!("skeleton.{dialect}.units"), sk.units.len());
                r.kv(
                    format!("skeleton.{dialect}.unsupported"),
                    sk.unsupported.len(),
                );
            }
        }
    }
    if let Some(dir) = out {
        let path = dir.join(format!("{name}.dot"));
        std::fs::write(&path, &dot).map_err(|e| Failure::Input {
            code: "IoError",
            message: format!("{}: {e}", path.display()),
        })?;
        r.kv("dot.out", path.display());
    }
    r.line(format!(
        "  dot: {} line(s), {} dashed",
        dot.lines().count(),
        dot.matches("style=dashed").count()
    ));
    r.kv("dot.dashed", dot.matches("style=dashed").count());
    Ok(())
}
