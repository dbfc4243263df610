use std::fmt::Write;

use super::{
    args, declared_members, forwarded_base, local_name, object_statements, params, sanitize,
    sanitize_type, template_instance, topological_order, Dialect, Emit, Skeleton, SkeletonUnit,
    UnsupportedConstruct,
};
use crate::category::{Diagram, MemberKind, Morphism, MorphismKind, SpecKind, Specification};

fn ty(sort: &str) -> String {
    sanitize_type(sort)
}

/// (extends, implements) parents of a class.
fn parents<'a>(d: &'a Diagram, s: &'a Specification) -> (Vec<&'a Morphism>, Vec<&'a Morphism>) {
    let mut extends = Vec::new();
    let mut implements = Vec::new();
    for m in d.incoming(&s.name).filter(|m| m.source != s.name) {
        let Some(src) = d.specs.get(&m.source) else {
            continue;
        };
        match (m.kind, src.kind) {
            (MorphismKind::Inheritance | MorphismKind::Implementation, SpecKind::AbstractClass) => {
                implements.push(m)
            }
            (MorphismKind::Inheritance, SpecKind::Class | SpecKind::GenericClass) => {
                extends.push(m)
            }
            _ => {}
        }
    }
    (extends, implements)
}

fn member(
    out: &mut String,
    d: &Diagram,
    s: &Specification,
    bases: &[&Morphism],
    emit: &Emit<'_>,
    interface: bool,
) {
    let m = match emit {
        Emit::Own(m) | Emit::Redeclared(m, _) => *m,
    };
    let class = sanitize(&s.name);
    let name = local_name(s, &m.name);
    let ps = params(&m.signature, ty);
    let _ = match m.kind {
        _ if m.is_generic && !m.kind.is_structor() => writeln!(out, "    // requires {name}({ps})"),
        MemberKind::PureVirtualMethod if interface => writeln!(out, "    void {name}({ps});"),
        MemberKind::PureVirtualMethod => writeln!(out, "    public abstract void {name}({ps});"),
        MemberKind::Method if interface => {
            writeln!(out, "    default void {name}({ps}) {{ /* TODO */ }}")
        }
        MemberKind::Method => writeln!(out, "    public void {name}({ps}) {{ /* TODO */ }}"),
        MemberKind::Constructor => {
            let base = match emit {
                Emit::Redeclared(_, base) => Some(*base),
                Emit::Own(_) => forwarded_base(d, s, bases, m),
            };
            match base {
                Some(_) => writeln!(
                    out,
                    "    public {class}({ps}) {{ super({}); }}",
                    args(&m.signature)
                ),
                None => writeln!(out, "    public {class}({ps}) {{ /* TODO */ }}"),
            }
        }
        MemberKind::Destructor => writeln!(out, "    // no destructor: {}", m.name),
        MemberKind::Field if interface => writeln!(
            out,
            "    // field {} is not expressible in an interface",
            m.name
        ),
        MemberKind::Field => {
            let sort = m
                .signature
                .first()
                .map_or_else(|| "Object".to_owned(), |s| ty(s));
            writeln!(out, "    private {sort} {name};")
        }
        MemberKind::TypeMember => writeln!(out, "    // uses type {}", m.name),
        MemberKind::Value => {
            let sort = m
                .signature
                .first()
                .map_or_else(|| "int".to_owned(), |s| ty(s));
            match &m.literal {
                Some(lit) => writeln!(out, "    static final {sort} {name} = {lit};"),
                None => writeln!(out, "    // value {name}: {sort}"),
            }
        }
    };
}

fn class(d: &Diagram, s: &Specification, unsupported: &mut Vec<UnsupportedConstruct>) -> String {
    let mut out = String::new();
    if let Some(generic) = template_instance(d, s) {
        let _ = writeln!(
            out,
            "// {} instantiates the generic class {}; not emitted",
            s.name, generic.name
        );
        return out;
    }
    if s.kind == SpecKind::GenericClass {
        let _ = writeln!(
            out,
            "// generic class {}<{}>: templates with structural parameters are not emitted",
            s.name,
            s.type_params.join(", ")
        );
        return out;
    }
    let name = sanitize(&s.name);
    let (extends, implements) = parents(d, s);
    if extends.len() > 1 {
        let names: Vec<&str> = extends.iter().map(|m| m.source.as_str()).collect();
        unsupported.push(UnsupportedConstruct {
            spec_name: s.name.clone(),
            reason: format!("multiple class inheritance from {}", names.join(", ")),
        });
        let _ = writeln!(
            out,
            "// {} extends {}: multiple class inheritance is unsupported",
            s.name,
            names.join(", ")
        );
        return out;
    }
    let interface = s.kind == SpecKind::AbstractClass;
    let _ = write!(
        out,
        "public {} {name}",
        if interface { "interface" } else { "class" }
    );
    let implemented: Vec<String> = implements
        .iter()
        .map(|m| sanitize_type(&m.source))
        .collect();
    if interface {
        if !implemented.is_empty() {
            let _ = write!(out, " extends {}", implemented.join(", "));
        }
    } else {
        if let Some(base) = extends.first() {
            let _ = write!(out, " extends {}", sanitize_type(&base.source));
        }
        if !implemented.is_empty() {
            let _ = write!(out, " implements {}", implemented.join(", "));
        }
    }
    out.push_str(" {\n");
    let bases: Vec<&Morphism> = extends.iter().chain(&implements).copied().collect();
    for emit in declared_members(d, s, &bases) {
        member(&mut out, d, s, &bases, &emit, interface);
    }
    out.push_str("}\n");
    out
}

pub(super) fn emit(d: &Diagram) -> Skeleton {
    let order = topological_order(d);
    let mut units = Vec::new();
    let mut unsupported = Vec::new();
    let statements = object_statements(
        d,
        &order,
        |c| {
            let object = sanitize(&c.object);
            let class = sanitize_type(&c.class);
            match &c.literal {
                Some(lit) => format!("{class} {object} = {lit};"),
                None => {
                    let args: Vec<&str> =
                        c.args.iter().map(|a| a.trim_start_matches('&')).collect();
                    format!("{class} {object} = new {class}({});", args.join(", "))
                }
            }
        },
        &mut unsupported,
    );
    for name in &order {
        let s = &d.specs[name];
        let text = match s.kind {
            SpecKind::Object => match statements.iter().find(|(o, _)| o == name) {
                Some((_, stmt)) => format!("{stmt}\n"),
                None => continue,
            },
            SpecKind::Unit => format!("// unit {}\n", s.name),
            SpecKind::BuiltinType => format!("// builtin type {}\n", s.name),
            SpecKind::TypeParameter => format!("// type parameter {}\n", s.name),
            SpecKind::Class | SpecKind::AbstractClass | SpecKind::GenericClass => {
                class(d, s, &mut unsupported)
            }
        };
        units.push(SkeletonUnit {
            spec_name: name.clone(),
            spec_kind: s.kind,
            dialect: Dialect::Interface,
            text,
        });
    }
    Skeleton {
        dialect: Dialect::Interface,
        units,
        unsupported,
        statements: statements.into_iter().map(|(_, s)| s).collect(),
    }
}
