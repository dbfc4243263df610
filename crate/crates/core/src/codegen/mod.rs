//! Source skeletons and DOT renderings of diagrams.

mod curly;
mod dot;
mod interface;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::category::{
    validate_diagram, Diagram, Member, MemberKind, Morphism, MorphismKind, SpecKind, Specification,
    Violation,
};
use crate::constructs::{classify_pushout, PatternTag};
use crate::pushout::recognize_pushout;

pub use dot::emit_dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dialect {
    /// C++-like.
    Curly,
    /// Java-like.
    Interface,
}

impl Dialect {
    pub fn as_str(self) -> &'static str {
        match self {
            Dialect::Curly => "curly",
            Dialect::Interface => "interface",
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "curly" => Ok(Dialect::Curly),
            "interface" => Ok(Dialect::Interface),
            other => Err(format!("unknown dialect `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonUnit {
    pub spec_name: String,
    pub spec_kind: SpecKind,
    pub dialect: Dialect,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsupportedConstruct {
    pub spec_name: String,
    pub reason: String,
}

impl fmt::Display for UnsupportedConstruct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.spec_name, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub dialect: Dialect,
    pub units: Vec<SkeletonUnit>,
    pub unsupported: Vec<UnsupportedConstruct>,
    /// Object statements in construction order.
    pub statements: Vec<String>,
}

impl Skeleton {
    /// All object statements wrapped in an entry point.
    pub fn main_block(&self) -> String {
        match self.dialect {
            Dialect::Curly => {
                let mut out = String::from("int main() {\n");
                for s in &self.statements {
                    out.push_str("    ");
                    out.push_str(s);
                    out.push('\n');
                }
                out.push_str("    return 0;\n}\n");
                out
            }
            Dialect::Interface => {
                let mut out = String::from(
                    "public class Main {\n    public static void main(String[] args) {\n",
                );
                for s in &self.statements {
                    out.push_str("        ");
                    out.push_str(s);
                    out.push('\n');
                }
                out.push_str("    }\n}\n");
                out
            }
        }
    }

    /// Every declaration unit followed by the entry point, as one text.
    pub fn full_text(&self) -> String {
        let mut out = String::new();
        for u in self
            .units
            .iter()
            .filter(|u| u.spec_kind != SpecKind::Object)
        {
            out.push_str(&u.text);
            out.push('\n');
        }
        out.push_str(&self.main_block());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodegenError {
    #[error("diagram is ill-formed: {} violation(s)", .0.len())]
    InvalidDiagram(Vec<Violation>),
}

impl CodegenError {
    pub fn code(&self) -> &'static str {
        match self {
            CodegenError::InvalidDiagram(_) => "InvalidDiagram",
        }
    }
}

/// Specification names sorted so that every morphism source precedes its
/// target; ties and cycles are broken alphabetically.
pub fn topological_order(d: &Diagram) -> Vec<String> {
    let mut indegree: BTreeMap<&str, usize> = d.specs.keys().map(|k| (k.as_str(), 0)).collect();
    let mut edges: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for m in d.morphisms.values() {
        if m.source == m.target
            || !indegree.contains_key(m.source.as_str())
            || !indegree.contains_key(m.target.as_str())
        {
            continue;
        }
        if edges.entry(&m.source).or_default().insert(&m.target) {
            *indegree.get_mut(m.target.as_str()).expect("known spec") += 1;
        }
    }
    let mut order = Vec::with_capacity(indegree.len());
    let mut done: BTreeSet<&str> = BTreeSet::new();
    while order.len() < indegree.len() {
        let next = indegree
            .iter()
            .find(|(k, n)| **n == 0 && !done.contains(*k))
            .map(|(k, _)| *k)
            // a cycle: take the first remaining name
            .or_else(|| indegree.keys().find(|k| !done.contains(*k)).copied())
            .expect("remaining spec");
        done.insert(next);
        order.push(next.to_owned());
        for t in edges.get(next).into_iter().flatten() {
            let n = indegree.get_mut(t).expect("known spec");
            *n = n.saturating_sub(1);
        }
    }
    order
}

/// Morphisms lying on the declared commuting square of a virtual-inheritance
/// pushout.
pub fn virtual_morphisms(d: &Diagram) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for decl in d.pushouts.values() {
        let Some(cone) = decl.cone() else { continue };
        let lhs = decl.span.left.then(&cone.left_coproj);
        let rhs = decl.span.right.then(&cone.right_coproj);
        let declared = d
            .equations
            .iter()
            .any(|eq| (eq.lhs == lhs && eq.rhs == rhs) || (eq.lhs == rhs && eq.rhs == lhs));
        if !declared {
            continue;
        }
        let virtual_inheritance = recognize_pushout(d, &cone)
            .ok()
            .and_then(|p| classify_pushout(d, &p).ok())
            .is_some_and(|p| p.tag == PatternTag::VirtualInheritance);
        if virtual_inheritance {
            out.extend(lhs.steps().iter().chain(rhs.steps()).cloned());
        }
    }
    out
}

/// An identifier usable in generated code.
pub fn sanitize(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        match c {
            c if c.is_ascii_alphanumeric() || c == '_' => out.push(c),
            '+' => out.push_str("_plus_"),
            '~' => out.push_str("_dtor_"),
            _ => out.push('_'),
        }
    }
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, '_');
    }
    out
}

/// Identifier for a member; a qualified `Y1::m1` loses its prefix when
/// that leaves it unambiguous within `spec`.
pub fn local_name(spec: &Specification, name: &str) -> String {
    let tail = |n: &str| n.rsplit_once("::").map_or(n, |(_, t)| t).to_owned();
    if name.contains("::") {
        let short = tail(name);
        if spec.member_names().filter(|n| tail(n) == short).count() == 1 {
            return sanitize(&short);
        }
    }
    sanitize(name)
}

/// A type expression: template arguments are kept.
pub fn sanitize_type(name: &str) -> String {
    let mut out = String::new();
    let mut word = String::new();
    for c in name.chars() {
        if matches!(c, '<' | '>' | ',' | '*' | '&') {
            if !word.is_empty() {
                out.push_str(&sanitize(&word));
                word.clear();
            }
            out.push(c);
        } else if c != ' ' {
            word.push(c);
        }
    }
    if !word.is_empty() || out.is_empty() {
        out.push_str(&sanitize(&word));
    }
    out
}

/// `Envelope<Zp>` when a generic class `Envelope` exists.
fn template_instance<'a>(d: &'a Diagram, spec: &Specification) -> Option<&'a Specification> {
    let (base, _) = spec.name.split_once('<')?;
    d.specs
        .get(base)
        .filter(|g| g.kind == SpecKind::GenericClass)
}

/// Parents a class derives from, in the dialect-independent sense.
fn bases<'a>(d: &'a Diagram, spec: &'a Specification) -> Vec<&'a Morphism> {
    d.incoming(&spec.name)
        .filter(|m| m.source != spec.name)
        .filter(|m| match m.kind {
            MorphismKind::Inheritance => true,
            MorphismKind::Implementation => d
                .specs
                .get(&m.source)
                .is_some_and(|s| s.kind == SpecKind::AbstractClass),
            _ => false,
        })
        .collect()
}

/// Type parameters a generic class derives from: those whose actual
/// argument enters an instance through an inheritance coprojection.
fn parameter_bases(d: &Diagram, generic: &Specification) -> Vec<String> {
    let mut out = Vec::new();
    for decl in d.pushouts.values() {
        let Some(cone) = decl.cone() else { continue };
        for (leg, other) in [
            (&decl.span.left, &cone.right_coproj),
            (&decl.span.right, &cone.left_coproj),
        ] {
            let into_generic = d.path_endpoints(leg).is_ok_and(|(_, t)| t == generic.name);
            let inherited = d
                .morphisms
                .get(other)
                .is_some_and(|m| m.kind == MorphismKind::Inheritance);
            if into_generic && inherited && !out.contains(&decl.span.apex) {
                out.push(decl.span.apex.clone());
            }
        }
    }
    out
}

/// Members of `spec` received from a base, with the base member they come from.
fn inherited<'a>(
    d: &'a Diagram,
    bases: &[&'a Morphism],
) -> BTreeMap<String, (&'a Specification, &'a Member)> {
    let mut out = BTreeMap::new();
    for m in bases {
        let Some(base) = d.specs.get(&m.source) else {
            continue;
        };
        for (from, to) in &m.mapping {
            let (Some(to), Some(member)) = (to.as_single(), base.member(from)) else {
                continue;
            };
            out.entry(to.to_owned()).or_insert((base, member));
        }
    }
    out
}

/// How a member of a class is emitted.
enum Emit<'a> {
    Own(&'a Member),
    /// A constructor taken over from `base`, re-declared in the class.
    Redeclared(&'a Member, &'a Specification),
}

/// Members a class declares itself: its own ones, implementations of pure
/// virtual base members, and constructors it takes over from its bases.
fn declared_members<'a>(
    d: &'a Diagram,
    spec: &'a Specification,
    bases: &[&'a Morphism],
) -> Vec<Emit<'a>> {
    let from_bases = inherited(d, bases);
    let mut out = Vec::new();
    for m in spec.members() {
        match from_bases.get(&m.name) {
            None => out.push(Emit::Own(m)),
            Some((_, base_member))
                if base_member.kind == MemberKind::PureVirtualMethod
                    && m.kind != MemberKind::PureVirtualMethod =>
            {
                out.push(Emit::Own(m))
            }
            Some((base, _)) if m.kind == MemberKind::Constructor => {
                let own_same = spec.members().any(|o| {
                    o.kind == MemberKind::Constructor
                        && o.name != m.name
                        && o.signature == m.signature
                        && !from_bases.contains_key(&o.name)
                });
                if !own_same {
                    out.push(Emit::Redeclared(m, base));
                }
            }
            Some(_) => {}
        }
    }
    out
}

/// Constructor whose body forwards to the base constructor of the same signature.
fn forwarded_base<'a>(
    d: &'a Diagram,
    spec: &Specification,
    bases: &[&'a Morphism],
    ctor: &Member,
) -> Option<&'a Specification> {
    let from_bases = inherited(d, bases);
    spec.members()
        .filter(|o| o.kind == MemberKind::Constructor && o.signature == ctor.signature)
        .find_map(|o| from_bases.get(&o.name).map(|(base, _)| *base))
}

fn params(signature: &[String], ty: impl Fn(&str) -> String) -> String {
    signature
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{} a{i}", ty(s)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn args(signature: &[String]) -> String {
    (0..signature.len())
        .map(|i| format!("a{i}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Object statements in dependency order; objects without a class are reported.
fn object_statements(
    d: &Diagram,
    order: &[String],
    render: impl Fn(&crate::constructs::ObjectConstruction) -> String,
    unsupported: &mut Vec<UnsupportedConstruct>,
) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for name in order {
        if d.specs[name].kind != SpecKind::Object {
            continue;
        }
        match crate::constructs::object_construction(d, name) {
            Ok(c) => out.push((name.clone(), render(&c))),
            Err(e) => unsupported.push(UnsupportedConstruct {
                spec_name: name.clone(),
                reason: e.to_string(),
            }),
        }
    }
    out
}

/// One unit per specification, in dependency order.
pub fn emit_skeleton(d: &Diagram, dialect: Dialect) -> Result<Skeleton, CodegenError> {
    let violations = validate_diagram(d);
    if !violations.is_empty() {
        return Err(CodegenError::InvalidDiagram(violations));
    }
    Ok(match dialect {
        Dialect::Curly => curly::emit(d),
        Dialect::Interface => interface::emit(d),
    })
}
