//! Specifications, members, morphisms and finitely presented diagrams.
//!
//! A [`Specification`] is a named collection of [`Member`]s. A [`Morphism`]
//! sends every member of its source to a member (or a chain of members) of
//! its target. A [`Diagram`] bundles specifications, morphisms and path
//! equations, i.e. a finite presentation of a category.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::pushout::{PushoutDecl, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemberKind {
    Method,
    PureVirtualMethod,
    Constructor,
    Destructor,
    Field,
    TypeMember,
    Value,
}

impl MemberKind {
    pub const ALL: [MemberKind; 7] = [
        MemberKind::Method,
        MemberKind::PureVirtualMethod,
        MemberKind::Constructor,
        MemberKind::Destructor,
        MemberKind::Field,
        MemberKind::TypeMember,
        MemberKind::Value,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MemberKind::Method => "method",
            MemberKind::PureVirtualMethod => "pure-virtual-method",
            MemberKind::Constructor => "constructor",
            MemberKind::Destructor => "destructor",
            MemberKind::Field => "field",
            MemberKind::TypeMember => "type-member",
            MemberKind::Value => "value",
        }
    }

    /// Constructors and destructors are not inherited and must be re-declared.
    pub fn is_structor(self) -> bool {
        matches!(self, MemberKind::Constructor | MemberKind::Destructor)
    }

    /// Kind of a member obtained by identifying members of kinds `self` and `other`.
    ///
    /// Identical kinds merge to themselves; a pure virtual method merges with
    /// a method into a method (the implementation wins).
    pub fn unify(self, other: MemberKind) -> Option<MemberKind> {
        use MemberKind::*;
        match (self, other) {
            (a, b) if a == b => Some(a),
            (Method, PureVirtualMethod) | (PureVirtualMethod, Method) => Some(Method),
            _ => None,
        }
    }
}

impl fmt::Display for MemberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Member {
    pub name: String,
    pub kind: MemberKind,
    /// Names of the specifications the member is declared over.
    pub signature: Vec<String>,
    /// A method carrying its own type parameter.
    pub is_generic: bool,
    /// Held through a pointer rather than by copy.
    pub indirect: bool,
    /// Literal carried by value members.
    pub literal: Option<String>,
}

impl Member {
    pub fn new(name: impl Into<String>, kind: MemberKind) -> Self {
        Member {
            name: name.into(),
            kind,
            signature: Vec::new(),
            is_generic: false,
            indirect: false,
            literal: None,
        }
    }

    pub fn method<S: Into<String>>(
        name: impl Into<String>,
        signature: impl IntoIterator<Item = S>,
    ) -> Self {
        Member::new(name, MemberKind::Method).with_signature(signature)
    }

    pub fn pure_method<S: Into<String>>(
        name: impl Into<String>,
        signature: impl IntoIterator<Item = S>,
    ) -> Self {
        Member::new(name, MemberKind::PureVirtualMethod).with_signature(signature)
    }

    pub fn constructor<S: Into<String>>(
        name: impl Into<String>,
        signature: impl IntoIterator<Item = S>,
    ) -> Self {
        Member::new(name, MemberKind::Constructor).with_signature(signature)
    }

    pub fn destructor(name: impl Into<String>) -> Self {
        Member::new(name, MemberKind::Destructor)
    }

    pub fn field(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Member::new(name, MemberKind::Field).with_signature([sort.into()])
    }

    pub fn type_member(name: impl Into<String>) -> Self {
        Member::new(name, MemberKind::TypeMember)
    }

    pub fn value(
        name: impl Into<String>,
        sort: impl Into<String>,
        literal: impl Into<String>,
    ) -> Self {
        let mut m = Member::new(name, MemberKind::Value).with_signature([sort.into()]);
        m.literal = Some(literal.into());
        m
    }

    pub fn with_signature<S: Into<String>>(
        mut self,
        signature: impl IntoIterator<Item = S>,
    ) -> Self {
        self.signature = signature.into_iter().map(Into::into).collect();
        self
    }

    pub fn generic(mut self) -> Self {
        self.is_generic = true;
        self
    }

    pub fn indirect(mut self) -> Self {
        self.indirect = true;
        self
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Member {
            name: name.into(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpecKind {
    Class,
    AbstractClass,
    GenericClass,
    BuiltinType,
    Object,
    TypeParameter,
    Unit,
}

impl SpecKind {
    pub const ALL: [SpecKind; 7] = [
        SpecKind::Class,
        SpecKind::AbstractClass,
        SpecKind::GenericClass,
        SpecKind::BuiltinType,
        SpecKind::Object,
        SpecKind::TypeParameter,
        SpecKind::Unit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SpecKind::Class => "class",
            SpecKind::AbstractClass => "abstract-class",
            SpecKind::GenericClass => "generic-class",
            SpecKind::BuiltinType => "builtin-type",
            SpecKind::Object => "object",
            SpecKind::TypeParameter => "type-parameter",
            SpecKind::Unit => "unit",
        }
    }

    /// Classes in the broad sense: things that can be inherited from.
    pub fn is_class_like(self) -> bool {
        matches!(
            self,
            SpecKind::Class | SpecKind::AbstractClass | SpecKind::GenericClass
        )
    }
}

impl fmt::Display for SpecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specification {
    pub name: String,
    pub kind: SpecKind,
    members: BTreeMap<String, Member>,
    /// Formal type parameters; nonempty exactly for generic classes.
    pub type_params: Vec<String>,
}

impl Specification {
    pub fn new(name: impl Into<String>, kind: SpecKind) -> Self {
        Specification {
            name: name.into(),
            kind,
            members: BTreeMap::new(),
            type_params: Vec::new(),
        }
    }

    pub fn generic<S: Into<String>>(
        name: impl Into<String>,
        params: impl IntoIterator<Item = S>,
    ) -> Self {
        let mut spec = Specification::new(name, SpecKind::GenericClass);
        spec.type_params = params.into_iter().map(Into::into).collect();
        spec
    }

    pub fn with_member(mut self, member: Member) -> Self {
        self.insert_member(member);
        self
    }

    pub fn with_members(mut self, members: impl IntoIterator<Item = Member>) -> Self {
        for m in members {
            self.insert_member(m);
        }
        self
    }

    /// Inserts a member, returning the one it replaced.
    pub fn insert_member(&mut self, member: Member) -> Option<Member> {
        self.members.insert(member.name.clone(), member)
    }

    pub fn remove_member(&mut self, name: &str) -> Option<Member> {
        self.members.remove(name)
    }

    pub fn member(&self, name: &str) -> Option<&Member> {
        self.members.get(name)
    }

    pub fn member_mut(&mut self, name: &str) -> Option<&mut Member> {
        self.members.get_mut(name)
    }

    pub fn has_member(&self, name: &str) -> bool {
        self.members.contains_key(name)
    }

    /// Members in name order.
    pub fn members(&self) -> impl Iterator<Item = &Member> + '_ {
        self.members.values()
    }

    pub fn member_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.members.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Nonempty chain of target members; a single step is a plain member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MemberExpr(Vec<String>);

impl MemberExpr {
    pub fn new<S: Into<String>>(steps: impl IntoIterator<Item = S>) -> Option<Self> {
        let steps: Vec<String> = steps.into_iter().map(Into::into).collect();
        (!steps.is_empty()).then_some(MemberExpr(steps))
    }

    pub fn single(name: impl Into<String>) -> Self {
        MemberExpr(vec![name.into()])
    }

    pub fn steps(&self) -> &[String] {
        &self.0
    }

    pub fn as_single(&self) -> Option<&str> {
        match self.0.as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }
}

impl fmt::Display for MemberExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MorphismKind {
    Identity,
    Inheritance,
    Implementation,
    TemplateParameter,
    Instantiation,
    Value,
    Polymorphism,
    Coprojection,
    Mediating,
    Generic,
}

impl MorphismKind {
    pub const ALL: [MorphismKind; 10] = [
        MorphismKind::Identity,
        MorphismKind::Inheritance,
        MorphismKind::Implementation,
        MorphismKind::TemplateParameter,
        MorphismKind::Instantiation,
        MorphismKind::Value,
        MorphismKind::Polymorphism,
        MorphismKind::Coprojection,
        MorphismKind::Mediating,
        MorphismKind::Generic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MorphismKind::Identity => "identity",
            MorphismKind::Inheritance => "inheritance",
            MorphismKind::Implementation => "implementation",
            MorphismKind::TemplateParameter => "template-parameter",
            MorphismKind::Instantiation => "instantiation",
            MorphismKind::Value => "value",
            MorphismKind::Polymorphism => "polymorphism",
            MorphismKind::Coprojection => "coprojection",
            MorphismKind::Mediating => "mediating",
            MorphismKind::Generic => "generic",
        }
    }

    /// Kind of `g.f` for `f` of kind `self` followed by `g` of kind `next`.
    pub fn then(self, next: MorphismKind) -> MorphismKind {
        match (self, next) {
            (MorphismKind::Identity, k) | (k, MorphismKind::Identity) => k,
            // inheritance is transitive
            (MorphismKind::Inheritance, MorphismKind::Inheritance) => MorphismKind::Inheritance,
            _ => MorphismKind::Generic,
        }
    }
}

impl fmt::Display for MorphismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MorphismKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MorphismKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown morphism kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub source: String,
    pub target: String,
    pub kind: MorphismKind,
    pub mapping: BTreeMap<String, MemberExpr>,
}

impl Morphism {
    pub fn new(
        name: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
        kind: MorphismKind,
    ) -> Self {
        Morphism {
            name: name.into(),
            source: source.into(),
            target: target.into(),
            kind,
            mapping: BTreeMap::new(),
        }
    }

    /// Sends every member of `source` to the like-named member of `target`.
    pub fn like_named(
        name: impl Into<String>,
        source: &Specification,
        target: &Specification,
        kind: MorphismKind,
    ) -> Self {
        let mut m = Morphism::new(name, &source.name, &target.name, kind);
        for member in source.member_names() {
            m.mapping
                .insert(member.to_owned(), MemberExpr::single(member));
        }
        m
    }

    pub fn map(mut self, from: impl Into<String>, to: MemberExpr) -> Self {
        self.mapping.insert(from.into(), to);
        self
    }

    pub fn map_single(self, from: impl Into<String>, to: impl Into<String>) -> Self {
        self.map(from, MemberExpr::single(to))
    }

    pub fn image(&self, member: &str) -> Option<&MemberExpr> {
        self.mapping.get(member)
    }

    pub fn image_single(&self, member: &str) -> Option<&str> {
        self.image(member).and_then(MemberExpr::as_single)
    }

    /// Every member goes to a plain member.
    pub fn is_single_valued(&self) -> bool {
        self.mapping.values().all(|e| e.as_single().is_some())
    }

    pub fn is_injective(&self) -> bool {
        let images: BTreeSet<&MemberExpr> = self.mapping.values().collect();
        images.len() == self.mapping.len()
    }

    /// Target members hit by a plain (length-1) image.
    pub fn single_image_set(&self) -> BTreeSet<&str> {
        self.mapping
            .values()
            .filter_map(MemberExpr::as_single)
            .collect()
    }
}

pub fn identity_morphism(spec: &Specification) -> Morphism {
    Morphism::like_named(
        format!("id_{}", spec.name),
        spec,
        spec,
        MorphismKind::Identity,
    )
}

/// The composite `g.f`: first `f`, then `g`.
pub fn compose_morphisms(f: &Morphism, g: &Morphism) -> Result<Morphism, CategoryError> {
    if f.target != g.source {
        return Err(CategoryError::NonComposable {
            first: f.name.clone(),
            second: g.name.clone(),
            target: f.target.clone(),
            second_source: g.source.clone(),
        });
    }
    let name = match (f.kind, g.kind) {
        (MorphismKind::Identity, _) => g.name.clone(),
        (_, MorphismKind::Identity) => f.name.clone(),
        _ => format!("{}.{}", g.name, f.name),
    };
    let mut composite = Morphism::new(name, &f.source, &g.target, f.kind.then(g.kind));
    for (member, expr) in &f.mapping {
        let mut steps = Vec::new();
        for step in expr.steps() {
            let image = g.image(step).ok_or_else(|| CategoryError::UnknownMember {
                morphism: g.name.clone(),
                member: step.clone(),
            })?;
            steps.extend(image.steps().iter().cloned());
        }
        composite.mapping.insert(
            member.clone(),
            MemberExpr::new(steps).expect("images are nonempty"),
        );
    }
    Ok(composite)
}

/// A chain of consecutive morphisms, or the identity path at a specification.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Path {
    Identity(String),
    Arrows(Vec<String>),
}

impl Path {
    pub fn single(morphism: impl Into<String>) -> Self {
        Path::Arrows(vec![morphism.into()])
    }

    /// Panics on an empty list; use [`Path::Identity`] for empty paths.
    pub fn of<S: Into<String>>(steps: impl IntoIterator<Item = S>) -> Self {
        let steps: Vec<String> = steps.into_iter().map(Into::into).collect();
        assert!(!steps.is_empty(), "use Path::Identity for the empty path");
        Path::Arrows(steps)
    }

    pub fn steps(&self) -> &[String] {
        match self {
            Path::Identity(_) => &[],
            Path::Arrows(steps) => steps,
        }
    }

    /// Appends one more morphism.
    pub fn then(&self, morphism: impl Into<String>) -> Path {
        let mut steps = self.steps().to_vec();
        steps.push(morphism.into());
        Path::Arrows(steps)
    }

    pub fn is_single(&self) -> bool {
        self.steps().len() == 1
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Path::Identity(spec) => write!(f, "id({spec})"),
            Path::Arrows(steps) => f.write_str(&steps.join(";")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Path,
    pub rhs: Path,
}

impl Equation {
    pub fn new(lhs: Path, rhs: Path) -> Self {
        Equation { lhs, rhs }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("cannot compose `{first}` (target {target}) with `{second}` (source {second_source})")]
    NonComposable {
        first: String,
        second: String,
        target: String,
        second_source: String,
    },
    #[error("unknown specification `{0}`")]
    UnknownSpecification(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("morphism `{morphism}` has no image for member `{member}`")]
    UnknownMember { morphism: String, member: String },
    #[error("path `{path}` is not consecutive at `{at}`")]
    NonConsecutivePath { path: String, at: String },
    #[error("paths `{lhs}` and `{rhs}` are not parallel")]
    NonParallelPaths { lhs: String, rhs: String },
}

impl CategoryError {
    pub fn code(&self) -> &'static str {
        match self {
            CategoryError::NonComposable { .. } => "NonComposable",
            CategoryError::UnknownSpecification(_) => "UnknownSpecification",
            CategoryError::UnknownMorphism(_) => "UnknownMorphism",
            CategoryError::UnknownMember { .. } => "UnknownMember",
            CategoryError::NonConsecutivePath { .. } => "NonConsecutivePath",
            CategoryError::NonParallelPaths { .. } => "NonParallelPaths",
        }
    }
}

/// Specifications, morphisms and equations, plus the spans and pushouts
/// declared over them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagram {
    pub specs: BTreeMap<String, Specification>,
    pub morphisms: BTreeMap<String, Morphism>,
    pub equations: Vec<Equation>,
    pub spans: BTreeMap<String, Span>,
    pub pushouts: BTreeMap<String, PushoutDecl>,
}

impl Diagram {
    pub fn new() -> Self {
        Diagram::default()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
            && self.morphisms.is_empty()
            && self.equations.is_empty()
            && self.spans.is_empty()
            && self.pushouts.is_empty()
    }

    pub fn add_spec(&mut self, spec: Specification) -> Option<Specification> {
        self.specs.insert(spec.name.clone(), spec)
    }

    pub fn add_morphism(&mut self, morphism: Morphism) -> Option<Morphism> {
        self.morphisms.insert(morphism.name.clone(), morphism)
    }

    pub fn with_spec(mut self, spec: Specification) -> Self {
        self.add_spec(spec);
        self
    }

    pub fn with_morphism(mut self, morphism: Morphism) -> Self {
        self.add_morphism(morphism);
        self
    }

    pub fn with_equation(mut self, equation: Equation) -> Self {
        self.equations.push(equation);
        self
    }

    pub fn spec(&self, name: &str) -> Result<&Specification, CategoryError> {
        self.specs
            .get(name)
            .ok_or_else(|| CategoryError::UnknownSpecification(name.to_owned()))
    }

    pub fn morphism(&self, name: &str) -> Result<&Morphism, CategoryError> {
        self.morphisms
            .get(name)
            .ok_or_else(|| CategoryError::UnknownMorphism(name.to_owned()))
    }

    /// Morphisms whose target is `spec`, in name order.
    pub fn incoming<'a>(&'a self, spec: &'a str) -> impl Iterator<Item = &'a Morphism> + 'a {
        self.morphisms.values().filter(move |m| m.target == spec)
    }

    pub fn outgoing<'a>(&'a self, spec: &'a str) -> impl Iterator<Item = &'a Morphism> + 'a {
        self.morphisms.values().filter(move |m| m.source == spec)
    }

    /// Source and target of a path, checking consecutiveness.
    pub fn path_endpoints(&self, path: &Path) -> Result<(String, String), CategoryError> {
        match path {
            Path::Identity(spec) => {
                self.spec(spec)?;
                Ok((spec.clone(), spec.clone()))
            }
            Path::Arrows(steps) => {
                let first = self.morphism(&steps[0])?;
                let mut at = first.target.clone();
                for step in &steps[1..] {
                    let m = self.morphism(step)?;
                    if m.source != at {
                        return Err(CategoryError::NonConsecutivePath {
                            path: path.to_string(),
                            at: step.clone(),
                        });
                    }
                    at = m.target.clone();
                }
                Ok((first.source.clone(), at))
            }
        }
    }

    /// The single morphism a path denotes, by successive composition.
    pub fn path_morphism(&self, path: &Path) -> Result<Morphism, CategoryError> {
        match path {
            Path::Identity(spec) => Ok(identity_morphism(self.spec(spec)?)),
            Path::Arrows(steps) => {
                self.path_endpoints(path)?;
                let mut acc = self.morphism(&steps[0])?.clone();
                for step in &steps[1..] {
                    acc = compose_morphisms(&acc, self.morphism(step)?)?;
                }
                if steps.len() > 1 {
                    acc.name = path.to_string();
                }
                Ok(acc)
            }
        }
    }

    /// Kinds of the steps of a path; empty for an identity path.
    pub fn path_kinds(&self, path: &Path) -> Result<Vec<MorphismKind>, CategoryError> {
        path.steps()
            .iter()
            .map(|s| self.morphism(s).map(|m| m.kind))
            .collect()
    }

    /// The named span, or the span of the named pushout declaration.
    pub fn find_span(&self, name: &str) -> Option<&Span> {
        self.spans
            .get(name)
            .or_else(|| self.pushouts.get(name).map(|p| &p.span))
    }

    /// Adds every entity of `other` whose name is not yet used here.
    pub fn merge_missing(&mut self, other: &Diagram) {
        for spec in other.specs.values() {
            self.specs
                .entry(spec.name.clone())
                .or_insert_with(|| spec.clone());
        }
        for m in other.morphisms.values() {
            self.morphisms
                .entry(m.name.clone())
                .or_insert_with(|| m.clone());
        }
        for eq in &other.equations {
            if !self.equations.contains(eq) {
                self.equations.push(eq.clone());
            }
        }
        for (name, span) in &other.spans {
            self.spans
                .entry(name.clone())
                .or_insert_with(|| span.clone());
        }
        for (name, decl) in &other.pushouts {
            self.pushouts
                .entry(name.clone())
                .or_insert_with(|| decl.clone());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    EmptyName,
    MemberKeyMismatch,
    MalformedMember,
    AbstractWithoutPureVirtual,
    UnitWithMembers,
    GenericParameters,
    UnknownSpecification,
    UnknownMember,
    NonTotalMapping,
    IdentityMismatch,
    InheritanceNotNamePreserving,
    UnknownMorphism,
    NonConsecutivePath,
    NonParallelEquation,
    UnsatisfiedEquation,
    MalformedSpan,
    MalformedCone,
    UnelaboratedPushout,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::EmptyName => "EmptyName",
            Rule::MemberKeyMismatch => "MemberKeyMismatch",
            Rule::MalformedMember => "MalformedMember",
            Rule::AbstractWithoutPureVirtual => "AbstractWithoutPureVirtual",
            Rule::UnitWithMembers => "UnitWithMembers",
            Rule::GenericParameters => "GenericParameters",
            Rule::UnknownSpecification => "UnknownSpecification",
            Rule::UnknownMember => "UnknownMember",
            Rule::NonTotalMapping => "NonTotalMapping",
            Rule::IdentityMismatch => "IdentityMismatch",
            Rule::InheritanceNotNamePreserving => "InheritanceNotNamePreserving",
            Rule::UnknownMorphism => "UnknownMorphism",
            Rule::NonConsecutivePath => "NonConsecutivePath",
            Rule::NonParallelEquation => "NonParallelEquation",
            Rule::UnsatisfiedEquation => "UnsatisfiedEquation",
            Rule::MalformedSpan => "MalformedSpan",
            Rule::MalformedCone => "MalformedCone",
            Rule::UnelaboratedPushout => "UnelaboratedPushout",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A broken invariant: which rule, the offending entity, and where it was found.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub rule: Rule,
    pub entity: String,
    pub context: String,
}

impl Violation {
    fn new(rule: Rule, entity: impl Into<String>, context: impl Into<String>) -> Self {
        Violation {
            rule,
            entity: entity.into(),
            context: context.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.context.is_empty() {
            write!(f, "{}({})", self.rule, self.entity)
        } else {
            write!(f, "{}({}) in {}", self.rule, self.entity, self.context)
        }
    }
}

/// Checks every structural invariant of `d`; the result is empty iff `d` is well formed.
pub fn validate_diagram(d: &Diagram) -> Vec<Violation> {
    let mut out = Vec::new();
    for (key, spec) in &d.specs {
        check_spec(key, spec, &mut out);
    }
    for (key, m) in &d.morphisms {
        check_morphism(d, key, m, &mut out);
    }
    for eq in &d.equations {
        check_equation(d, eq, &mut out);
    }
    for (name, span) in &d.spans {
        check_span(d, name, span, &mut out);
    }
    for (name, decl) in &d.pushouts {
        check_span(d, name, &decl.span, &mut out);
        match &decl.coprojections {
            None => out.push(Violation::new(
                Rule::UnelaboratedPushout,
                &decl.vertex,
                name,
            )),
            Some((left, right)) => check_cone_legs(d, name, decl, left, right, &mut out),
        }
    }
    out
}

fn check_spec(key: &str, spec: &Specification, out: &mut Vec<Violation>) {
    if spec.name.is_empty() {
        out.push(Violation::new(Rule::EmptyName, "", "specification"));
    }
    if spec.name != key {
        out.push(Violation::new(Rule::MemberKeyMismatch, &spec.name, key));
    }
    for (name, member) in &spec.members {
        if member.name.is_empty() {
            out.push(Violation::new(Rule::EmptyName, "", &spec.name));
        } else if member.name != *name {
            out.push(Violation::new(
                Rule::MemberKeyMismatch,
                &member.name,
                &spec.name,
            ));
        }
        if member.literal.is_some() && member.kind != MemberKind::Value {
            out.push(Violation::new(
                Rule::MalformedMember,
                &member.name,
                &spec.name,
            ));
        }
    }
    match spec.kind {
        SpecKind::AbstractClass
            if !spec
                .members()
                .any(|m| m.kind == MemberKind::PureVirtualMethod) =>
        {
            out.push(Violation::new(
                Rule::AbstractWithoutPureVirtual,
                &spec.name,
                "",
            ));
        }
        SpecKind::Unit if !spec.is_empty() => {
            out.push(Violation::new(Rule::UnitWithMembers, &spec.name, ""));
        }
        _ => {}
    }
    if (spec.kind == SpecKind::GenericClass) == spec.type_params.is_empty() {
        out.push(Violation::new(Rule::GenericParameters, &spec.name, ""));
    }
}

fn check_morphism(d: &Diagram, key: &str, m: &Morphism, out: &mut Vec<Violation>) {
    if m.name.is_empty() {
        out.push(Violation::new(Rule::EmptyName, "", "morphism"));
    }
    if m.name != key {
        out.push(Violation::new(Rule::MemberKeyMismatch, &m.name, key));
    }
    let source = d.specs.get(&m.source);
    let target = d.specs.get(&m.target);
    if source.is_none() {
        out.push(Violation::new(
            Rule::UnknownSpecification,
            &m.source,
            &m.name,
        ));
    }
    if target.is_none() {
        out.push(Violation::new(
            Rule::UnknownSpecification,
            &m.target,
            &m.name,
        ));
    }
    let (Some(source), Some(target)) = (source, target) else {
        return;
    };
    for member in m.mapping.keys() {
        if !source.has_member(member) {
            out.push(Violation::new(Rule::UnknownMember, member, &m.name));
        }
    }
    for member in source.member_names() {
        if !m.mapping.contains_key(member) {
            out.push(Violation::new(Rule::NonTotalMapping, member, &m.name));
        }
    }
    for expr in m.mapping.values() {
        for step in expr.steps() {
            if !target.has_member(step) {
                out.push(Violation::new(Rule::UnknownMember, step, &m.name));
            }
        }
    }
    let like_named = m
        .mapping
        .iter()
        .all(|(from, to)| to.as_single() == Some(from.as_str()));
    match m.kind {
        MorphismKind::Identity if m.source != m.target || !like_named => {
            out.push(Violation::new(Rule::IdentityMismatch, &m.name, ""));
        }
        MorphismKind::Inheritance if !like_named => {
            out.push(Violation::new(
                Rule::InheritanceNotNamePreserving,
                &m.name,
                "",
            ));
        }
        _ => {}
    }
}

fn check_path(
    d: &Diagram,
    path: &Path,
    context: &str,
    out: &mut Vec<Violation>,
) -> Option<(String, String)> {
    match d.path_endpoints(path) {
        Ok(ends) => Some(ends),
        Err(CategoryError::UnknownMorphism(name)) => {
            out.push(Violation::new(Rule::UnknownMorphism, name, context));
            None
        }
        Err(CategoryError::UnknownSpecification(name)) => {
            out.push(Violation::new(Rule::UnknownSpecification, name, context));
            None
        }
        Err(_) => {
            out.push(Violation::new(
                Rule::NonConsecutivePath,
                path.to_string(),
                context,
            ));
            None
        }
    }
}

fn check_equation(d: &Diagram, eq: &Equation, out: &mut Vec<Violation>) {
    let context = eq.to_string();
    let lhs = check_path(d, &eq.lhs, &context, out);
    let rhs = check_path(d, &eq.rhs, &context, out);
    let (Some(lhs), Some(rhs)) = (lhs, rhs) else {
        return;
    };
    if lhs != rhs {
        out.push(Violation::new(Rule::NonParallelEquation, &context, ""));
        return;
    }
    if let (Ok(l), Ok(r)) = (d.path_morphism(&eq.lhs), d.path_morphism(&eq.rhs)) {
        if l.mapping != r.mapping {
            out.push(Violation::new(Rule::UnsatisfiedEquation, &context, ""));
        }
    }
}

fn check_span(d: &Diagram, name: &str, span: &Span, out: &mut Vec<Violation>) {
    if !d.specs.contains_key(&span.apex) {
        out.push(Violation::new(Rule::UnknownSpecification, &span.apex, name));
        return;
    }
    for leg in [&span.left, &span.right] {
        if let Some((source, _)) = check_path(d, leg, name, out) {
            if source != span.apex {
                out.push(Violation::new(Rule::MalformedSpan, leg.to_string(), name));
            }
        }
    }
}

fn check_cone_legs(
    d: &Diagram,
    name: &str,
    decl: &PushoutDecl,
    left: &str,
    right: &str,
    out: &mut Vec<Violation>,
) {
    if !d.specs.contains_key(&decl.vertex) {
        out.push(Violation::new(
            Rule::UnknownSpecification,
            &decl.vertex,
            name,
        ));
    }
    for (leg, coproj) in [(&decl.span.left, left), (&decl.span.right, right)] {
        let Some(m) = d.morphisms.get(coproj) else {
            out.push(Violation::new(Rule::UnknownMorphism, coproj, name));
            continue;
        };
        let leg_target = d.path_endpoints(leg).ok().map(|(_, t)| t);
        if m.target != decl.vertex || leg_target.is_some_and(|t| t != m.source) {
            out.push(Violation::new(Rule::MalformedCone, coproj, name));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, members: &[&str]) -> Specification {
        Specification::new(name, SpecKind::Class).with_members(
            members
                .iter()
                .map(|m| Member::method(*m, Vec::<String>::new())),
        )
    }

    #[test]
    fn identity_of_single_member_spec() {
        let x = spec("X", &["m0"]);
        let id = identity_morphism(&x);
        assert_eq!(id.kind, MorphismKind::Identity);
        assert_eq!(id.image_single("m0"), Some("m0"));
        assert_eq!(id.mapping.len(), 1);
    }

    #[test]
    fn identity_of_unit_is_empty() {
        let u = Specification::new("U", SpecKind::Unit);
        assert!(identity_morphism(&u).mapping.is_empty());
    }

    #[test]
    fn identity_of_y1() {
        let y1 = spec("Y1", &["m0", "m1"]);
        let id = identity_morphism(&y1);
        assert_eq!(id.image_single("m0"), Some("m0"));
        assert_eq!(id.image_single("m1"), Some("m1"));
    }

    #[test]
    fn compose_inheritance_chain() {
        let x = spec("X", &["m0"]);
        let y1 = spec("Y1", &["m0", "m1"]);
        let z = spec("Z", &["m0", "m1", "m2"]);
        let f1 = Morphism::like_named("f1", &x, &y1, MorphismKind::Inheritance);
        let g1 = Morphism::like_named("g1", &y1, &z, MorphismKind::Inheritance);
        let gf = compose_morphisms(&f1, &g1).unwrap();
        assert_eq!((gf.source.as_str(), gf.target.as_str()), ("X", "Z"));
        assert_eq!(gf.image_single("m0"), Some("m0"));
        assert_eq!(gf.kind, MorphismKind::Inheritance);
        assert_eq!(gf.name, "g1.f1");
    }

    #[test]
    fn compose_flattens_member_expressions() {
        let f = Morphism::new("f", "A", "B", MorphismKind::Generic)
            .map("m", MemberExpr::new(["p", "q"]).unwrap());
        let g = Morphism::new("g", "B", "C", MorphismKind::Generic)
            .map_single("p", "r")
            .map("q", MemberExpr::new(["s", "t"]).unwrap());
        let gf = compose_morphisms(&f, &g).unwrap();
        assert_eq!(gf.image("m").unwrap().steps(), ["r", "s", "t"]);
    }

    #[test]
    fn compose_rejects_mismatched_endpoints() {
        let f = Morphism::new("f", "A", "B", MorphismKind::Generic);
        let g = Morphism::new("g", "C", "D", MorphismKind::Generic);
        assert_eq!(
            compose_morphisms(&f, &g).unwrap_err().code(),
            "NonComposable"
        );
    }

    #[test]
    fn unit_laws_preserve_mapping_and_kind() {
        let a = spec("A", &["x", "y"]);
        let b = spec("B", &["x", "y", "z"]);
        let f = Morphism::like_named("f", &a, &b, MorphismKind::Implementation);
        let left = compose_morphisms(&identity_morphism(&a), &f).unwrap();
        let right = compose_morphisms(&f, &identity_morphism(&b)).unwrap();
        assert_eq!(left.mapping, f.mapping);
        assert_eq!(right.mapping, f.mapping);
        assert_eq!(left.kind, MorphismKind::Implementation);
        assert_eq!(right.kind, MorphismKind::Implementation);
    }

    #[test]
    fn kind_composition_table() {
        use MorphismKind::*;
        assert_eq!(Inheritance.then(Inheritance), Inheritance);
        assert_eq!(Identity.then(Value), Value);
        assert_eq!(Instantiation.then(Identity), Instantiation);
        assert_eq!(Instantiation.then(Inheritance), Generic);
        assert_eq!(Value.then(Value), Generic);
    }

    #[test]
    fn member_kind_unification() {
        use MemberKind::*;
        assert_eq!(Method.unify(PureVirtualMethod), Some(Method));
        assert_eq!(Field.unify(Field), Some(Field));
        assert_eq!(Field.unify(Method), None);
    }

    fn virtual_diamond() -> Diagram {
        let x = spec("X", &["m0"]);
        let y1 = spec("Y1", &["m0", "m1"]);
        let y2 = spec("Y2", &["m0", "m2"]);
        let z = spec("Z", &["m0", "m1", "m2"]);
        Diagram::new()
            .with_morphism(Morphism::like_named(
                "f1",
                &x,
                &y1,
                MorphismKind::Inheritance,
            ))
            .with_morphism(Morphism::like_named(
                "f2",
                &x,
                &y2,
                MorphismKind::Inheritance,
            ))
            .with_morphism(Morphism::like_named(
                "g1",
                &y1,
                &z,
                MorphismKind::Inheritance,
            ))
            .with_morphism(Morphism::like_named(
                "g2",
                &y2,
                &z,
                MorphismKind::Inheritance,
            ))
            .with_spec(x)
            .with_spec(y1)
            .with_spec(y2)
            .with_spec(z)
            .with_equation(Equation::new(
                Path::of(["f1", "g1"]),
                Path::of(["f2", "g2"]),
            ))
    }

    #[test]
    fn well_formed_diamond_validates() {
        assert_eq!(validate_diagram(&virtual_diamond()), vec![]);
    }

    #[test]
    fn missing_member_is_reported() {
        let mut d = virtual_diamond();
        d.morphisms
            .get_mut("g1")
            .unwrap()
            .mapping
            .insert("m1".into(), MemberExpr::single("m9"));
        d.morphisms.get_mut("g1").unwrap().kind = MorphismKind::Generic;
        assert_eq!(
            validate_diagram(&d),
            vec![Violation::new(Rule::UnknownMember, "m9", "g1")]
        );
    }

    #[test]
    fn non_parallel_equation_is_reported() {
        let mut d = virtual_diamond();
        d.equations = vec![Equation::new(Path::single("f1"), Path::single("f2"))];
        let v = validate_diagram(&d);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::NonParallelEquation);
    }

    #[test]
    fn spec_kind_invariants() {
        let d = Diagram::new()
            .with_spec(
                Specification::new("A", SpecKind::AbstractClass)
                    .with_member(Member::method("f", [""; 0])),
            )
            .with_spec(
                Specification::new("U", SpecKind::Unit).with_member(Member::type_member("t")),
            )
            .with_spec(Specification::new("G", SpecKind::GenericClass));
        let rules: Vec<Rule> = validate_diagram(&d).into_iter().map(|v| v.rule).collect();
        assert_eq!(
            rules,
            vec![
                Rule::AbstractWithoutPureVirtual,
                Rule::GenericParameters,
                Rule::UnitWithMembers
            ]
        );
    }

    #[test]
    fn non_total_and_inheritance_renaming() {
        let a = spec("A", &["x", "y"]);
        let b = spec("B", &["x", "z"]);
        let m = Morphism::new("m", "A", "B", MorphismKind::Inheritance).map_single("x", "z");
        let d = Diagram::new().with_spec(a).with_spec(b).with_morphism(m);
        let rules: Vec<Rule> = validate_diagram(&d).into_iter().map(|v| v.rule).collect();
        assert_eq!(
            rules,
            vec![Rule::NonTotalMapping, Rule::InheritanceNotNamePreserving]
        );
    }

    #[test]
    fn path_endpoints_and_composition() {
        let d = virtual_diamond();
        assert_eq!(
            d.path_endpoints(&Path::of(["f1", "g1"])).unwrap(),
            ("X".to_owned(), "Z".to_owned())
        );
        assert_eq!(
            d.path_endpoints(&Path::of(["f1", "f2"]))
                .unwrap_err()
                .code(),
            "NonConsecutivePath"
        );
        let m = d.path_morphism(&Path::of(["f2", "g2"])).unwrap();
        assert_eq!(m.image_single("m0"), Some("m0"));
        assert_eq!(d.path_kinds(&Path::Identity("X".into())).unwrap(), vec![]);
    }
}
