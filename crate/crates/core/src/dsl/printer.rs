use std::fmt::Write;

use super::lexer::{tokenize, TokenKind};
use super::{DslError, KEYWORDS};
use crate::category::{
    validate_diagram, Diagram, Member, MemberKind, Morphism, Path, SpecKind, Specification,
};
use crate::pushout::Span;

const HEADER: &str = "# dml diagram\n";

fn single_token(text: &str) -> Option<TokenKind> {
    match tokenize(text) {
        Ok(mut tokens) if tokens.len() == 1 => Some(tokens.remove(0).kind),
        _ => None,
    }
}

fn quoted(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// `name` as it must be written in a `.dml` file.
pub fn quote_name(name: &str) -> String {
    match single_token(name) {
        Some(TokenKind::Ident(s)) if s == name && !KEYWORDS.contains(&name) => s,
        _ => quoted(name),
    }
}

fn literal(text: &str) -> String {
    match single_token(text) {
        Some(TokenKind::Number(s)) if s == text => s,
        _ => quote_name(text),
    }
}

fn sorts(signature: &[String]) -> String {
    signature
        .iter()
        .map(|s| literal(s))
        .collect::<Vec<_>>()
        .join(", ")
}

fn member(m: &Member) -> String {
    let mut out = String::new();
    if m.is_generic {
        out.push_str("generic ");
    }
    if m.indirect {
        out.push_str("indirect ");
    }
    let name = quote_name(&m.name);
    let with_sorts = |head: &str| {
        if m.signature.is_empty() {
            format!("{head} {name}")
        } else {
            format!("{head} {name}: {}", sorts(&m.signature))
        }
    };
    let text = match m.kind {
        MemberKind::Method => format!("method {name}({})", sorts(&m.signature)),
        MemberKind::PureVirtualMethod => format!("pure method {name}({})", sorts(&m.signature)),
        MemberKind::Constructor => format!("ctor {name}({})", sorts(&m.signature)),
        MemberKind::Destructor => format!("dtor {name}({})", sorts(&m.signature)),
        MemberKind::Field => with_sorts("field"),
        MemberKind::TypeMember => with_sorts("type"),
        MemberKind::Value => match &m.literal {
            Some(lit) => format!("{} = {}", with_sorts("value"), literal(lit)),
            None => with_sorts("value"),
        },
    };
    out.push_str(&text);
    out
}

fn spec_kind(kind: SpecKind) -> &'static str {
    match kind {
        SpecKind::Class => "class",
        SpecKind::AbstractClass => "abstract",
        SpecKind::GenericClass => "generic",
        SpecKind::BuiltinType => "builtin",
        SpecKind::Object => "object",
        SpecKind::TypeParameter => "typename",
        SpecKind::Unit => "unit",
    }
}

fn spec(out: &mut String, s: &Specification) {
    if s.kind == SpecKind::GenericClass {
        out.push_str("generic ");
        out.push_str(&quote_name(&s.name));
        for p in &s.type_params {
            out.push(' ');
            out.push_str(&quote_name(p));
        }
    } else {
        let _ = write!(out, "spec {} {}", quote_name(&s.name), spec_kind(s.kind));
    }
    if s.is_empty() {
        out.push_str(" {}\n");
        return;
    }
    out.push_str(" {\n");
    for m in s.members() {
        let _ = writeln!(out, "    {}", member(m));
    }
    out.push_str("}\n");
}

fn morphism(out: &mut String, m: &Morphism) {
    let _ = write!(
        out,
        "morphism {} : {} -> {} kind={}",
        quote_name(&m.name),
        quote_name(&m.source),
        quote_name(&m.target),
        m.kind
    );
    let explicit: Vec<(&String, String)> = m
        .mapping
        .iter()
        .filter(|(from, to)| to.as_single() != Some(from.as_str()))
        .map(|(from, to)| {
            let steps: Vec<String> = to.steps().iter().map(|s| quote_name(s)).collect();
            (from, steps.join("."))
        })
        .collect();
    if explicit.is_empty() {
        out.push('\n');
        return;
    }
    out.push_str(" {\n");
    for (from, to) in explicit {
        let _ = writeln!(out, "    {} -> {to}", quote_name(from));
    }
    out.push_str("}\n");
}

fn path(p: &Path) -> String {
    match p {
        Path::Identity(spec) => format!("id({})", quote_name(spec)),
        Path::Arrows(steps) => steps
            .iter()
            .map(|s| quote_name(s))
            .collect::<Vec<_>>()
            .join(";"),
    }
}

fn span_args(s: &Span) -> String {
    format!(
        "({}, {}, {})",
        quote_name(&s.apex),
        path(&s.left),
        path(&s.right)
    )
}

/// Canonical text of a well-formed diagram.
pub fn serialize(d: &Diagram) -> Result<String, DslError> {
    let violations = validate_diagram(d);
    if !violations.is_empty() {
        return Err(DslError::InvalidDiagram(violations));
    }
    let mut out = String::from(HEADER);
    let mut section = |body: String| {
        if !body.is_empty() {
            out.push('\n');
            out.push_str(&body);
        }
    };

    let mut specs = String::new();
    for s in d.specs.values() {
        spec(&mut specs, s);
    }
    section(specs);

    let mut morphisms = String::new();
    for m in d.morphisms.values() {
        morphism(&mut morphisms, m);
    }
    section(morphisms);

    let mut equations = String::new();
    for eq in &d.equations {
        let _ = writeln!(equations, "equation {} = {}", path(&eq.lhs), path(&eq.rhs));
    }
    section(equations);

    let mut spans = String::new();
    for (name, s) in &d.spans {
        let _ = writeln!(spans, "span {}{}", quote_name(name), span_args(s));
    }
    section(spans);

    let mut pushouts = String::new();
    for (name, p) in &d.pushouts {
        let _ = write!(
            pushouts,
            "pushout {} from span{}",
            quote_name(&p.vertex),
            span_args(&p.span)
        );
        if let Some((l, r)) = &p.coprojections {
            let _ = write!(pushouts, " via {}, {}", quote_name(l), quote_name(r));
        }
        if *name != p.vertex {
            let _ = write!(pushouts, " as {}", quote_name(name));
        }
        pushouts.push('\n');
    }
    section(pushouts);
    Ok(out)
}
