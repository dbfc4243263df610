//! Object-oriented constructions expressed as pushouts, and the reverse
//! reading of a pushout as one of those constructions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::category::{
    CategoryError, Diagram, Member, MemberKind, Morphism, MorphismKind, Path, SpecKind,
    Specification,
};
use crate::pushout::{compute_pushout, is_pushout, Certificate, PushoutError, PushoutResult, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTag {
    VirtualInheritance,
    TemplateParameterPassing,
    ObjectInstantiation,
    Polymorphism,
    GenericGluing,
}

impl PatternTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PatternTag::VirtualInheritance => "virtual-inheritance",
            PatternTag::TemplateParameterPassing => "template-parameter-passing",
            PatternTag::ObjectInstantiation => "object-instantiation",
            PatternTag::Polymorphism => "polymorphism",
            PatternTag::GenericGluing => "generic-gluing",
        }
    }
}

impl fmt::Display for PatternTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushoutPattern {
    pub tag: PatternTag,
    /// `gluing-point`, `left`, `right` and `vertex`.
    pub bindings: BTreeMap<&'static str, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvelopeVariant {
    Copy,
    Indirect,
    Inheritance,
}

impl EnvelopeVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            EnvelopeVariant::Copy => "copy",
            EnvelopeVariant::Indirect => "indirect",
            EnvelopeVariant::Inheritance => "inheritance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Pushout(#[from] PushoutError),
    #[error("cone on `{vertex}` is not a pushout: {certificate}")]
    NotAPushout {
        vertex: String,
        certificate: Certificate,
    },
    #[error("`{0}` is not a generic class over that parameter")]
    NotGeneric(String),
    #[error("`{actual}` lacks `{member}` required by the parameter interface")]
    MissingInterfaceMember { actual: String, member: String },
    #[error("cannot instantiate `{class}` of kind {kind}")]
    NotInstantiable { class: String, kind: SpecKind },
    #[error("`{class}` takes at most one constructor argument here, got {count}")]
    TooManyArguments { class: String, count: usize },
    #[error("`{class}` has no constructor taking {arity} argument(s)")]
    NoMatchingConstructor { class: String, arity: usize },
    #[error("no morphism from `{from}` to `{to}`")]
    Unreachable { from: String, to: String },
    #[error("`{0}` is not an object")]
    NotAnObject(String),
    #[error("`{0}` is not an abstract class")]
    NotAbstract(String),
    #[error("`{extension}` does not contain `{member}`")]
    NotAnExtension { extension: String, member: String },
    #[error("`{derived}` leaves `{member}` pure virtual")]
    UnimplementedVirtual { derived: String, member: String },
}

impl ConstructError {
    pub fn code(&self) -> &'static str {
        match self {
            ConstructError::Pushout(e) => e.code(),
            ConstructError::NotAPushout { .. } => "NotAPushout",
            ConstructError::NotGeneric(_) => "NotGeneric",
            ConstructError::MissingInterfaceMember { .. } => "MissingInterfaceMember",
            ConstructError::NotInstantiable { .. } => "NotInstantiable",
            ConstructError::TooManyArguments { .. } => "TooManyArguments",
            ConstructError::NoMatchingConstructor { .. } => "NoMatchingConstructor",
            ConstructError::Unreachable { .. } => "Unreachable",
            ConstructError::NotAnObject(_) => "NotAnObject",
            ConstructError::NotAbstract(_) => "NotAbstract",
            ConstructError::NotAnExtension { .. } => "NotAnExtension",
            ConstructError::UnimplementedVirtual { .. } => "UnimplementedVirtual",
        }
    }
}

impl From<CategoryError> for ConstructError {
    fn from(e: CategoryError) -> Self {
        ConstructError::Pushout(e.into())
    }
}

/// Shortest chain of morphisms from `from` to `to`, identities skipped.
pub fn shortest_path(d: &Diagram, from: &str, to: &str) -> Option<Path> {
    if from == to {
        return Some(Path::Identity(from.to_owned()));
    }
    let mut previous: BTreeMap<&str, &Morphism> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = BTreeSet::from([from]);
    while let Some(at) = queue.pop_front() {
        for m in d.outgoing(at) {
            if m.kind == MorphismKind::Identity || !seen.insert(m.target.as_str()) {
                continue;
            }
            previous.insert(&m.target, m);
            if m.target == to {
                let mut steps = vec![m.name.clone()];
                let mut cur = m.source.as_str();
                while cur != from {
                    let p = previous[cur];
                    steps.push(p.name.clone());
                    cur = &p.source;
                }
                steps.reverse();
                return Some(Path::of(steps));
            }
            queue.push_back(&m.target);
        }
    }
    None
}

fn leg_kind(d: &Diagram, path: &Path) -> Result<Option<MorphismKind>, CategoryError> {
    let kinds = d.path_kinds(path)?;
    Ok(kinds.into_iter().reduce(MorphismKind::then))
}

fn last_kind(d: &Diagram, path: &Path) -> Result<Option<MorphismKind>, CategoryError> {
    Ok(d.path_kinds(path)?.last().copied())
}

fn is_extension(d: &Diagram, path: &Path) -> Result<bool, CategoryError> {
    let m = d.path_morphism(path)?;
    let (source, target) = (d.spec(&m.source)?, d.spec(&m.target)?);
    Ok(m.is_single_valued() && m.is_injective() && target.len() > source.len())
}

/// Reads a verified pushout as one of the known constructions, first match wins.
pub fn classify_pushout(d: &Diagram, p: &PushoutResult) -> Result<PushoutPattern, ConstructError> {
    let extended = p.extend(d);
    let d = &extended;
    let verdict = is_pushout(d, &p.cone).map_err(|e| match e {
        PushoutError::NonCommutingCone { vertex, member } => ConstructError::NotAPushout {
            vertex,
            certificate: Certificate::ExtraMember { member },
        },
        e => e.into(),
    })?;
    if !verdict.is_pushout {
        return Err(ConstructError::NotAPushout {
            vertex: p.cone.vertex.clone(),
            certificate: verdict.certificate,
        });
    }

    let span = &p.cone.base;
    let apex = d.spec(&span.apex)?;
    let (_, left_target) = d.path_endpoints(&span.left)?;
    let (_, right_target) = d.path_endpoints(&span.right)?;
    let (kl, kr) = (leg_kind(d, &span.left)?, leg_kind(d, &span.right)?);
    let inheritance = Some(MorphismKind::Inheritance);

    let template_leg =
        |kind: Option<MorphismKind>, target: &str, other: &str| -> Result<bool, CategoryError> {
            Ok(kind == Some(MorphismKind::TemplateParameter)
                && d.spec(target)?.kind == SpecKind::GenericClass
                && matches!(
                    d.spec(other)?.kind,
                    SpecKind::Class | SpecKind::AbstractClass
                ))
        };
    let instantiating = |path: &Path| -> Result<bool, CategoryError> {
        Ok(matches!(
            last_kind(d, path)?,
            Some(MorphismKind::Instantiation | MorphismKind::Value)
        ))
    };

    let tag = if kl == inheritance && kr == inheritance {
        PatternTag::VirtualInheritance
    } else if apex.kind == SpecKind::TypeParameter
        && (template_leg(kl, &left_target, &right_target)?
            || template_leg(kr, &right_target, &left_target)?)
    {
        PatternTag::TemplateParameterPassing
    } else if instantiating(&span.left)? || instantiating(&span.right)? {
        PatternTag::ObjectInstantiation
    } else if apex.kind == SpecKind::AbstractClass
        && ((kl == inheritance && is_extension(d, &span.right)?)
            || (kr == inheritance && is_extension(d, &span.left)?))
    {
        PatternTag::Polymorphism
    } else {
        PatternTag::GenericGluing
    };
    let bindings = BTreeMap::from([
        ("gluing-point", span.apex.clone()),
        ("left", left_target),
        ("right", right_target),
        ("vertex", p.cone.vertex.clone()),
    ]);
    Ok(PushoutPattern { tag, bindings })
}

/// Replaces whole-identifier occurrences of `from` inside `text`.
pub fn substitute_identifier(text: &str, from: &str, to: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        out.push_str(if word == from { to } else { word.as_str() });
        word.clear();
    };
    for c in text.chars() {
        if c.is_alphanumeric() || c == '_' {
            word.push(c);
        } else {
            flush(&mut word, &mut out);
            out.push(c);
        }
    }
    flush(&mut word, &mut out);
    out
}

/// A working copy of `d` plus whatever had to be synthesized.
struct Workspace {
    diagram: Diagram,
    specs: Vec<Specification>,
    morphisms: Vec<Morphism>,
}

impl Workspace {
    fn new(d: &Diagram) -> Self {
        Workspace {
            diagram: d.clone(),
            specs: Vec::new(),
            morphisms: Vec::new(),
        }
    }

    fn fresh_morphism_name(&self, base: String) -> String {
        let mut name = base.clone();
        let mut n = 1;
        while self.diagram.morphisms.contains_key(&name) {
            n += 1;
            name = format!("{base}_{n}");
        }
        name
    }

    fn add_spec(&mut self, spec: Specification) {
        self.diagram.add_spec(spec.clone());
        self.specs.push(spec);
    }

    fn add_morphism(&mut self, m: Morphism) -> String {
        let name = m.name.clone();
        self.diagram.add_morphism(m.clone());
        self.morphisms.push(m);
        name
    }

    /// An existing morphism `source -> target`, preferring `kind`, or a new
    /// like-named one.
    fn leg(
        &mut self,
        source: &str,
        target: &str,
        kind: MorphismKind,
    ) -> Result<String, ConstructError> {
        let existing: Vec<&Morphism> = self
            .diagram
            .outgoing(source)
            .filter(|m| m.target == target && m.kind != MorphismKind::Identity)
            .collect();
        if let Some(m) = existing
            .iter()
            .find(|m| m.kind == kind)
            .or(existing.first())
        {
            return Ok(m.name.clone());
        }
        let (s, t) = (self.diagram.spec(source)?, self.diagram.spec(target)?);
        if let Some(missing) = s.member_names().find(|x| !t.has_member(x)) {
            return Err(ConstructError::MissingInterfaceMember {
                actual: target.to_owned(),
                member: missing.to_owned(),
            });
        }
        let name = self.fresh_morphism_name(format!("{source}_{target}"));
        let m = Morphism::like_named(name, s, t, kind);
        Ok(self.add_morphism(m))
    }

    fn finish(self, mut p: PushoutResult) -> PushoutResult {
        p.support_specs = self.specs;
        p.support_morphisms = self.morphisms;
        p
    }
}

/// Passes `actual` for the parameter `param` of the generic class `generic`.
pub fn template_instantiate(
    d: &Diagram,
    generic: &str,
    param: &str,
    actual: &str,
    result_name: &str,
) -> Result<PushoutResult, ConstructError> {
    let g = d.spec(generic)?;
    if g.kind != SpecKind::GenericClass || !g.type_params.iter().any(|p| p == param) {
        return Err(ConstructError::NotGeneric(generic.to_owned()));
    }
    let actual_spec = d.spec(actual)?;
    let mut ws = Workspace::new(d);
    match d.specs.get(param) {
        Some(p) => {
            if let Some(missing) = p.member_names().find(|m| !actual_spec.has_member(m)) {
                return Err(ConstructError::MissingInterfaceMember {
                    actual: actual.to_owned(),
                    member: missing.to_owned(),
                });
            }
        }
        None => ws.add_spec(Specification::new(param, SpecKind::TypeParameter)),
    }
    let to_generic = ws.leg(param, generic, MorphismKind::TemplateParameter)?;
    let to_actual = ws.leg(param, actual, MorphismKind::Implementation)?;
    let span = Span::of(param, to_generic, to_actual);
    let mut p = compute_pushout(&ws.diagram, &span, result_name)?;
    p.vertex.kind = SpecKind::Class;
    p.vertex.type_params.clear();
    let names: Vec<String> = p.vertex.member_names().map(str::to_owned).collect();
    for name in names {
        let member = p.vertex.member_mut(&name).expect("listed member");
        for token in &mut member.signature {
            *token = substitute_identifier(token, param, actual);
        }
    }
    Ok(ws.finish(p))
}

/// Name of the class a constructor belongs to: `Envelope<Zp>` -> `Envelope`.
fn base_name(class: &str) -> &str {
    class.split(['<', '⟨']).next().unwrap_or(class)
}

/// An object holding `literal` of sort `sort`, reached from `sort`.
fn value_object(ws: &mut Workspace, sort: &str, literal: &str) -> Result<Path, ConstructError> {
    let found = ws.diagram.specs.values().find(|s| {
        s.kind == SpecKind::Object
            && s.members().any(|m| {
                m.kind == MemberKind::Value
                    && m.literal.as_deref() == Some(literal)
                    && m.signature == [sort]
            })
    });
    if let Some(path) = found.and_then(|s| shortest_path(&ws.diagram, sort, &s.name)) {
        return Ok(path);
    }
    let base = ws.diagram.spec(sort)?.clone();
    let mut name = format!("{literal}:{sort}");
    while ws.diagram.specs.contains_key(&name) {
        name.push('\'');
    }
    let mut object =
        Specification::new(&name, SpecKind::Object).with_members(base.members().cloned());
    object.insert_member(Member::value("val", sort, literal));
    let morphism = Morphism::like_named(
        ws.fresh_morphism_name(format!("val_{sort}_{literal}")),
        &base,
        &object,
        MorphismKind::Value,
    );
    ws.add_spec(object);
    Ok(Path::single(ws.add_morphism(morphism)))
}

/// Builds the object `obj_name` of class `cls` from at most one constructor
/// argument: a literal, or `&Name` for an existing object.
pub fn instantiate_object(
    d: &Diagram,
    cls: &str,
    obj_name: &str,
    ctor_args: &[String],
) -> Result<PushoutResult, ConstructError> {
    let class = d.spec(cls)?;
    if !matches!(class.kind, SpecKind::Class | SpecKind::BuiltinType) {
        return Err(ConstructError::NotInstantiable {
            class: cls.to_owned(),
            kind: class.kind,
        });
    }
    if d.specs.contains_key(obj_name) {
        return Err(PushoutError::NameTaken(obj_name.to_owned()).into());
    }
    let mut ws = Workspace::new(d);
    let span = match ctor_args {
        [] => Span::new(
            cls,
            Path::Identity(cls.to_owned()),
            Path::Identity(cls.to_owned()),
        ),
        [arg] => {
            let sort = if class.kind == SpecKind::BuiltinType {
                cls.to_owned()
            } else {
                let ctors: Vec<&Member> = class
                    .members()
                    .filter(|m| m.kind == MemberKind::Constructor && m.signature.len() == 1)
                    .collect();
                let ctor = ctors
                    .iter()
                    .find(|m| m.name == base_name(cls))
                    .or(ctors.first())
                    .ok_or_else(|| ConstructError::NoMatchingConstructor {
                        class: cls.to_owned(),
                        arity: 1,
                    })?;
                ctor.signature[0].clone()
            };
            let argument = match arg.strip_prefix('&') {
                Some(object) => {
                    if d.spec(object)?.kind != SpecKind::Object {
                        return Err(ConstructError::NotAnObject(object.to_owned()));
                    }
                    shortest_path(d, &sort, object).ok_or_else(|| ConstructError::Unreachable {
                        from: sort.clone(),
                        to: object.to_owned(),
                    })?
                }
                None => value_object(&mut ws, &sort, arg)?,
            };
            let class_leg = match shortest_path(&ws.diagram, &sort, cls) {
                Some(path) => path,
                None => Path::single(ws.leg(&sort, cls, MorphismKind::Generic)?),
            };
            Span::new(sort, class_leg, argument)
        }
        more => {
            return Err(ConstructError::TooManyArguments {
                class: cls.to_owned(),
                count: more.len(),
            })
        }
    };
    let mut p = compute_pushout(&ws.diagram, &span, obj_name)?;
    p.vertex.kind = SpecKind::Object;
    p.left_coproj.kind = if class.kind == SpecKind::BuiltinType {
        MorphismKind::Value
    } else {
        MorphismKind::Instantiation
    };
    Ok(ws.finish(p))
}

/// Glues the extension `A+g` of an abstract class `A` onto a class `B`
/// implementing `A`, giving `B+g`.
pub fn polymorphism_apply(
    d: &Diagram,
    abstract_spec: &str,
    extension: &str,
    derived: &str,
    result_name: &str,
) -> Result<PushoutResult, ConstructError> {
    let a = d.spec(abstract_spec)?;
    if a.kind != SpecKind::AbstractClass {
        return Err(ConstructError::NotAbstract(abstract_spec.to_owned()));
    }
    let (ext, b) = (d.spec(extension)?, d.spec(derived)?);
    if let Some(missing) = a.member_names().find(|m| !ext.has_member(m)) {
        return Err(ConstructError::NotAnExtension {
            extension: extension.to_owned(),
            member: missing.to_owned(),
        });
    }
    for m in a
        .members()
        .filter(|m| m.kind == MemberKind::PureVirtualMethod)
    {
        if b.member(&m.name)
            .is_none_or(|bm| bm.kind != MemberKind::Method)
        {
            return Err(ConstructError::UnimplementedVirtual {
                derived: derived.to_owned(),
                member: m.name.clone(),
            });
        }
    }
    let mut ws = Workspace::new(d);
    let inherit = ws.leg(abstract_spec, derived, MorphismKind::Inheritance)?;
    let extend = ws.leg(abstract_spec, extension, MorphismKind::Generic)?;
    let mut p = compute_pushout(
        &ws.diagram,
        &Span::of(abstract_spec, inherit, extend),
        result_name,
    )?;
    p.right_coproj.kind = MorphismKind::Polymorphism;
    Ok(ws.finish(p))
}

/// A generic adaptor `name<B>` over the interface `param`, optionally also
/// deriving from `abstract_spec`.
pub fn make_envelope(
    variant: EnvelopeVariant,
    name: &str,
    param: &Specification,
    abstract_spec: Option<&Specification>,
) -> Diagram {
    let b = &param.name;
    let mut env = Specification::generic(name, [b.clone()]);
    env.insert_member(Member::constructor(base_name(name), [b.clone()]));
    let forwarded = param.members().filter(|m| !m.kind.is_structor());
    let mut d = Diagram::new();
    match variant {
        EnvelopeVariant::Copy | EnvelopeVariant::Indirect => {
            let field = Member::field("_b", b.clone());
            env.insert_member(if variant == EnvelopeVariant::Indirect {
                field.indirect()
            } else {
                field
            });
            for m in forwarded {
                let mut m = m.clone();
                if m.kind == MemberKind::PureVirtualMethod {
                    m.kind = MemberKind::Method;
                }
                env.insert_member(m);
            }
        }
        EnvelopeVariant::Inheritance => {
            for m in forwarded {
                env.insert_member(m.clone());
            }
        }
    }
    if let Some(a) = abstract_spec {
        for m in a.members().filter(|m| !m.kind.is_structor()) {
            if !env.has_member(&m.name) {
                let mut m = m.clone();
                m.kind = MemberKind::Method;
                env.insert_member(m);
            }
        }
        d.add_morphism(like_named_total(
            &format!("{}_{name}", a.name),
            a,
            &env,
            MorphismKind::Inheritance,
        ));
        d.add_spec(a.clone());
    }
    let param_kind = match variant {
        EnvelopeVariant::Inheritance => MorphismKind::Inheritance,
        _ => MorphismKind::TemplateParameter,
    };
    d.add_morphism(like_named_total(
        &format!("{b}_{name}"),
        param,
        &env,
        param_kind,
    ));
    d.add_spec(param.clone());
    d.add_spec(env);
    d
}

/// Like-named mapping restricted to members present in `target`.
fn like_named_total(
    name: &str,
    source: &Specification,
    target: &Specification,
    kind: MorphismKind,
) -> Morphism {
    let mut m = Morphism::new(name, &source.name, &target.name, kind);
    for x in source.member_names().filter(|x| target.has_member(x)) {
        m = m.map_single(x, x);
    }
    m
}

/// Constructors and destructors the vertex takes over from the legs; these
/// have to be declared again in the generated class.
pub fn constructor_adjustment(p: &PushoutResult) -> Vec<Member> {
    p.vertex
        .members()
        .filter(|m| m.kind.is_structor() && p.provenance.contains_key(&m.name))
        .cloned()
        .collect()
}

/// How an object is built: its class and rendered constructor arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectConstruction {
    pub object: String,
    pub class: String,
    pub args: Vec<String>,
    /// The object is a literal of a builtin type, written as the literal itself.
    pub literal: Option<String>,
}

impl fmt::Display for ObjectConstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.literal, self.args.is_empty()) {
            (Some(lit), _) => write!(f, "{lit};"),
            (None, true) => write!(f, "{} {};", self.class, self.object),
            (None, false) => write!(
                f,
                "{} {}({});",
                self.class,
                self.object,
                self.args.join(", ")
            ),
        }
    }
}

fn class_morphism<'a>(d: &'a Diagram, object: &'a str) -> Option<&'a Morphism> {
    d.incoming(object).find(|m| {
        matches!(m.kind, MorphismKind::Instantiation | MorphismKind::Value)
            && d.specs
                .get(&m.source)
                .is_some_and(|s| s.kind != SpecKind::Object)
    })
}

fn literal_of(d: &Diagram, object: &Specification) -> Option<String> {
    let class = d.spec(&class_morphism(d, &object.name)?.source).ok()?;
    if class.kind != SpecKind::BuiltinType {
        return None;
    }
    object
        .members()
        .find(|m| m.kind == MemberKind::Value && m.literal.is_some())
        .and_then(|m| m.literal.clone())
}

/// Reads back the constructor call that builds `object`.
///
/// The class is the source of the incoming instantiation; other objects
/// mapping into `object` are arguments when they contribute members the
/// class does not provide.
pub fn object_construction(
    d: &Diagram,
    object: &str,
) -> Result<ObjectConstruction, ConstructError> {
    let spec = d.spec(object)?;
    if spec.kind != SpecKind::Object {
        return Err(ConstructError::NotAnObject(object.to_owned()));
    }
    let class_m =
        class_morphism(d, object).ok_or_else(|| ConstructError::NotAnObject(object.to_owned()))?;
    let from_class = class_m.single_image_set();
    let mut args = Vec::new();
    for m in d.incoming(object) {
        let Some(source) = d.specs.get(&m.source) else {
            continue;
        };
        if source.kind != SpecKind::Object || m.kind == MorphismKind::Identity {
            continue;
        }
        if m.single_image_set().iter().any(|x| !from_class.contains(x)) {
            args.push(literal_of(d, source).unwrap_or_else(|| format!("&{}", source.name)));
        }
    }
    Ok(ObjectConstruction {
        object: object.to_owned(),
        class: class_m.source.clone(),
        args,
        literal: literal_of(d, spec),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiffItem {
    SpecRemoved(String),
    SpecAdded(String),
    MorphismKindChanged {
        source: String,
        target: String,
        from: MorphismKind,
        to: MorphismKind,
    },
    MorphismRemoved {
        source: String,
        target: String,
    },
    MorphismAdded {
        source: String,
        target: String,
    },
    ConstructionChanged {
        object: String,
        from: Vec<String>,
        to: Vec<String>,
    },
}

impl fmt::Display for DiffItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffItem::SpecRemoved(s) => write!(f, "- spec {s}"),
            DiffItem::SpecAdded(s) => write!(f, "+ spec {s}"),
            DiffItem::MorphismKindChanged {
                source,
                target,
                from,
                to,
            } => {
                write!(f, "~ {source} -> {target}: {from} => {to}")
            }
            DiffItem::MorphismRemoved { source, target } => write!(f, "- {source} -> {target}"),
            DiffItem::MorphismAdded { source, target } => write!(f, "+ {source} -> {target}"),
            DiffItem::ConstructionChanged { object, from, to } => {
                write!(
                    f,
                    "~ {object}({}) => {object}({})",
                    from.join(", "),
                    to.join(", ")
                )
            }
        }
    }
}

/// Differences between two designs, by specification names and morphism
/// endpoints. Changes that follow from a removed specification or from a
/// changed object construction are folded into those items.
pub fn structural_diff(a: &Diagram, b: &Diagram) -> Vec<DiffItem> {
    let mut items = Vec::new();
    for name in a.specs.keys().filter(|n| !b.specs.contains_key(*n)) {
        items.push(DiffItem::SpecRemoved(name.clone()));
    }
    for name in b.specs.keys().filter(|n| !a.specs.contains_key(*n)) {
        items.push(DiffItem::SpecAdded(name.clone()));
    }
    let mut rebuilt = BTreeSet::new();
    for (name, spec) in &a.specs {
        if spec.kind != SpecKind::Object || !b.specs.contains_key(name) {
            continue;
        }
        let (Ok(before), Ok(after)) = (object_construction(a, name), object_construction(b, name))
        else {
            continue;
        };
        if before.args != after.args || before.class != after.class {
            rebuilt.insert(name.clone());
            items.push(DiffItem::ConstructionChanged {
                object: name.clone(),
                from: before.args,
                to: after.args,
            });
        }
    }

    let edges = |d: &Diagram| -> BTreeMap<(String, String), BTreeSet<MorphismKind>> {
        let mut out: BTreeMap<(String, String), BTreeSet<MorphismKind>> = BTreeMap::new();
        for m in d
            .morphisms
            .values()
            .filter(|m| m.kind != MorphismKind::Identity)
        {
            out.entry((m.source.clone(), m.target.clone()))
                .or_default()
                .insert(m.kind);
        }
        out
    };
    let (ea, eb) = (edges(a), edges(b));
    let folded = |(s, t): &(String, String)| {
        !(a.specs.contains_key(s)
            && b.specs.contains_key(s)
            && a.specs.contains_key(t)
            && b.specs.contains_key(t))
            || rebuilt.contains(t)
    };
    for (key, kinds) in &ea {
        if folded(key) {
            continue;
        }
        let (source, target) = key.clone();
        match eb.get(key) {
            None => items.push(DiffItem::MorphismRemoved { source, target }),
            Some(other) if other != kinds => items.push(DiffItem::MorphismKindChanged {
                source,
                target,
                from: *kinds.iter().next().expect("non-empty"),
                to: *other.iter().next().expect("non-empty"),
            }),
            Some(_) => {}
        }
    }
    for key in eb.keys().filter(|k| !ea.contains_key(*k) && !folded(k)) {
        items.push(DiffItem::MorphismAdded {
            source: key.0.clone(),
            target: key.1.clone(),
        });
    }
    items
}
