use std::fmt::Write;

use super::{
    args, bases, declared_members, forwarded_base, local_name, object_statements, parameter_bases,
    params, sanitize, sanitize_type, template_instance, topological_order, virtual_morphisms,
    Dialect, Emit, Skeleton, SkeletonUnit,
};
use crate::category::{Diagram, MemberKind, SpecKind, Specification};

fn ty(sort: &str) -> String {
    sanitize_type(sort)
}

fn member(out: &mut String, spec: &Specification, class: &str, emit: &Emit<'_>) {
    let (m, base) = match emit {
        Emit::Own(m) => (*m, None),
        Emit::Redeclared(m, base) => (*m, Some(*base)),
    };
    let ps = params(&m.signature, ty);
    let name = local_name(spec, &m.name);
    let _ = match m.kind {
        _ if m.is_generic && !m.kind.is_structor() => {
            writeln!(out, "    // requires {}({ps})", name)
        }
        MemberKind::Method => writeln!(out, "    void {name}({ps}) {{ /* TODO */ }}"),
        MemberKind::PureVirtualMethod => writeln!(out, "    virtual void {name}({ps}) = 0;"),
        MemberKind::Constructor => match base {
            Some(base) => writeln!(
                out,
                "    {class}({ps}) : {}({}) {{ /* TODO */ }}",
                sanitize_type(&base.name),
                args(&m.signature)
            ),
            None => writeln!(out, "    {class}({ps}) {{ /* TODO */ }}"),
        },
        MemberKind::Destructor => writeln!(out, "    virtual ~{class}() {{ /* TODO */ }}"),
        MemberKind::Field => {
            let sort = m
                .signature
                .first()
                .map_or_else(|| "void*".to_owned(), |s| ty(s));
            let star = if m.indirect { "*" } else { "" };
            writeln!(out, "    {sort}{star} {name};")
        }
        MemberKind::TypeMember => match m.signature.first() {
            Some(s) => writeln!(out, "    typedef {} {name};", ty(s)),
            None => writeln!(out, "    // uses type {}", m.name),
        },
        MemberKind::Value => {
            let sort = m
                .signature
                .first()
                .map_or_else(|| "int".to_owned(), |s| ty(s));
            match &m.literal {
                Some(lit) => writeln!(out, "    static const {sort} {name} = {lit};"),
                None => writeln!(out, "    static const {sort} {name};"),
            }
        }
    };
}

fn requirements(out: &mut String, s: &Specification) {
    for m in s.members() {
        let _ = writeln!(
            out,
            "//   {} {}({})",
            m.kind.as_str(),
            m.name,
            m.signature.join(", ")
        );
    }
}

fn class(
    d: &Diagram,
    s: &Specification,
    virtual_ms: &std::collections::BTreeSet<String>,
) -> String {
    let mut out = String::new();
    if let Some(generic) = template_instance(d, s) {
        let _ = writeln!(out, "// {} instantiates {}", s.name, generic.name);
        let _ = writeln!(out, "template struct {};", sanitize_type(&s.name));
        return out;
    }
    if s.kind == SpecKind::GenericClass {
        let ps: Vec<String> = s
            .type_params
            .iter()
            .map(|p| format!("typename {}", sanitize(p)))
            .collect();
        let _ = writeln!(out, "template <{}>", ps.join(", "));
    }
    let name = sanitize(&s.name);
    let bases = bases(d, s);
    let _ = write!(out, "struct {name}");
    let mut list: Vec<String> = Vec::new();
    if s.kind == SpecKind::GenericClass {
        list.extend(
            parameter_bases(d, s)
                .iter()
                .map(|p| format!("public {}", sanitize(p))),
        );
    }
    list.extend(bases.iter().map(|m| {
        let v = if virtual_ms.contains(&m.name) {
            "virtual "
        } else {
            ""
        };
        format!("public {v}{}", sanitize_type(&m.source))
    }));
    if !list.is_empty() {
        let _ = write!(out, " : {}", list.join(", "));
    }
    out.push_str(" {\n");
    for emit in declared_members(d, s, &bases) {
        if let Emit::Own(m) = &emit {
            if m.kind == MemberKind::Constructor {
                if let Some(base) = forwarded_base(d, s, &bases, m) {
                    member(&mut out, s, &name, &Emit::Redeclared(m, base));
                    continue;
                }
            }
        }
        member(&mut out, s, &name, &emit);
    }
    out.push_str("};\n");
    out
}

pub(super) fn emit(d: &Diagram) -> Skeleton {
    let order = topological_order(d);
    let virtual_ms = virtual_morphisms(d);
    let mut units = Vec::new();
    let mut unsupported = Vec::new();
    let statements = object_statements(
        d,
        &order,
        |c| match &c.literal {
            Some(lit) => format!("{lit};"),
            None if c.args.is_empty() => {
                format!("{} {};", sanitize_type(&c.class), sanitize(&c.object))
            }
            None => format!(
                "{} {}({});",
                sanitize_type(&c.class),
                sanitize(&c.object),
                c.args.join(", ")
            ),
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
            SpecKind::TypeParameter => {
                let mut out = format!("// typename {}\n", s.name);
                requirements(&mut out, s);
                out
            }
            SpecKind::Class | SpecKind::AbstractClass | SpecKind::GenericClass => {
                class(d, s, &virtual_ms)
            }
        };
        units.push(SkeletonUnit {
            spec_name: name.clone(),
            spec_kind: s.kind,
            dialect: Dialect::Curly,
            text,
        });
    }
    Skeleton {
        dialect: Dialect::Curly,
        units,
        unsupported,
        statements: statements.into_iter().map(|(_, s)| s).collect(),
    }
}
