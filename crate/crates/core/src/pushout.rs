//! Spans, cones and pushouts of specifications.
//!
//! The pushout vertex of a span `Y1 <- X -> Y2` is the disjoint union of the
//! members of `Y1` and `Y2`, quotiented by `f1(x) ~ f2(x)` for every member
//! `x` of the apex. The coprojections send every member to its class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::category::{
    CategoryError, Diagram, Equation, Member, MemberExpr, MemberKind, Morphism, MorphismKind, Path,
    SpecKind, Specification,
};
use crate::quotient::{amalgamate, class_names};

pub use crate::quotient::{NamingPolicy, Side as Leg};

/// Two paths out of a common apex (the gluing point).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Span {
    pub apex: String,
    pub left: Path,
    pub right: Path,
}

impl Span {
    pub fn new(apex: impl Into<String>, left: Path, right: Path) -> Self {
        Span {
            apex: apex.into(),
            left,
            right,
        }
    }

    /// Shorthand for a span of two single morphisms.
    pub fn of(apex: impl Into<String>, left: impl Into<String>, right: impl Into<String>) -> Self {
        Span::new(apex, Path::single(left), Path::single(right))
    }

    pub fn swapped(&self) -> Span {
        Span::new(&self.apex, self.right.clone(), self.left.clone())
    }

    pub fn leg(&self, leg: Leg) -> &Path {
        match leg {
            Leg::Left => &self.left,
            Leg::Right => &self.right,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span({}, {}, {})", self.apex, self.left, self.right)
    }
}

/// A span completed by a vertex and two coprojections.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cone {
    pub base: Span,
    pub vertex: String,
    pub left_coproj: String,
    pub right_coproj: String,
}

impl Cone {
    pub fn coproj(&self, leg: Leg) -> &str {
        match leg {
            Leg::Left => &self.left_coproj,
            Leg::Right => &self.right_coproj,
        }
    }
}

/// `pushout <vertex> from span(...) [via g1, g2] [as name]` in a diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushoutDecl {
    pub name: String,
    pub vertex: String,
    pub span: Span,
    /// Absent until the engine has built the vertex.
    pub coprojections: Option<(String, String)>,
}

impl PushoutDecl {
    pub fn cone(&self) -> Option<Cone> {
        self.coprojections.as_ref().map(|(l, r)| Cone {
            base: self.span.clone(),
            vertex: self.vertex.clone(),
            left_coproj: l.clone(),
            right_coproj: r.clone(),
        })
    }
}

/// Where a vertex member came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Origin {
    pub leg: Leg,
    pub spec: String,
    pub member: String,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.spec, self.member)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushoutResult {
    pub cone: Cone,
    pub vertex: Specification,
    pub left_coproj: Morphism,
    pub right_coproj: Morphism,
    /// Vertex member -> the leg members glued into it, left leg first.
    pub provenance: BTreeMap<String, Vec<Origin>>,
    /// `left;g1 = right;g2`.
    pub added_equation: Equation,
    /// Auxiliary specifications a construction had to introduce.
    pub support_specs: Vec<Specification>,
    pub support_morphisms: Vec<Morphism>,
}

impl PushoutResult {
    pub fn coproj(&self, leg: Leg) -> &Morphism {
        match leg {
            Leg::Left => &self.left_coproj,
            Leg::Right => &self.right_coproj,
        }
    }

    /// Constructors and destructors end up in the vertex only by adjunction.
    pub fn needs_constructor_adjustment(&self) -> bool {
        self.vertex.members().any(|m| m.kind.is_structor())
    }

    /// `d` with the vertex, coprojections, support entities, the commuting
    /// equation and a pushout declaration added.
    pub fn extend(&self, d: &Diagram) -> Diagram {
        let mut out = d.clone();
        for spec in &self.support_specs {
            out.specs
                .entry(spec.name.clone())
                .or_insert_with(|| spec.clone());
        }
        for m in &self.support_morphisms {
            out.morphisms
                .entry(m.name.clone())
                .or_insert_with(|| m.clone());
        }
        out.specs
            .entry(self.vertex.name.clone())
            .or_insert_with(|| self.vertex.clone());
        for m in [&self.left_coproj, &self.right_coproj] {
            out.morphisms
                .entry(m.name.clone())
                .or_insert_with(|| m.clone());
        }
        if !out.equations.contains(&self.added_equation) {
            out.equations.push(self.added_equation.clone());
        }
        out.pushouts
            .entry(self.vertex.name.clone())
            .or_insert_with(|| PushoutDecl {
                name: self.vertex.name.clone(),
                vertex: self.vertex.name.clone(),
                span: self.cone.base.clone(),
                coprojections: Some((
                    self.left_coproj.name.clone(),
                    self.right_coproj.name.clone(),
                )),
            });
        out
    }
}

/// Outcome of checking a cone against the canonical pushout of its base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Canonical vertex member -> cone vertex member; a kind-preserving bijection.
    Isomorphism {
        comparison: BTreeMap<String, String>,
    },
    /// A vertex member outside the image of both coprojections.
    ExtraMember { member: String },
    /// Two members the span does not identify land on the same vertex member.
    OverIdentification {
        first: String,
        second: String,
        image: String,
    },
    KindMismatch {
        member: String,
        expected: MemberKind,
        found: MemberKind,
    },
    /// A coprojection sends a member to a chain of members.
    CompositeImage { member: String },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Isomorphism { .. } => "isomorphism",
            Certificate::ExtraMember { .. } => "extra-member",
            Certificate::OverIdentification { .. } => "over-identification",
            Certificate::KindMismatch { .. } => "kind-mismatch",
            Certificate::CompositeImage { .. } => "composite-image",
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Isomorphism { comparison } => {
                let pairs: Vec<String> = comparison
                    .iter()
                    .map(|(a, b)| format!("{a} -> {b}"))
                    .collect();
                write!(f, "isomorphism {{{}}}", pairs.join(", "))
            }
            Certificate::ExtraMember { member } => write!(f, "extra member `{member}`"),
            Certificate::OverIdentification {
                first,
                second,
                image,
            } => {
                write!(f, "`{first}` and `{second}` both land on `{image}`")
            }
            Certificate::KindMismatch {
                member,
                expected,
                found,
            } => write!(f, "`{member}` should be a {expected} but is a {found}"),
            Certificate::CompositeImage { member } => {
                write!(f, "`{member}` is sent to a composite member")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushoutVerdict {
    pub is_pushout: bool,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PushoutError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("leg `{leg}` does not start at the apex `{apex}`")]
    MalformedSpan { leg: String, apex: String },
    #[error("leg `{leg}` sends `{member}` to a composite member")]
    CompositeLegTarget { leg: String, member: String },
    #[error("cannot merge `{member}`: {first} and {second} differ in kind")]
    KindClash {
        member: String,
        first: String,
        second: String,
    },
    #[error("name `{0}` is already used in the diagram")]
    NameTaken(String),
    #[error("cone on `{vertex}` does not commute at apex member `{member}`")]
    NonCommutingCone { vertex: String, member: String },
    #[error("coprojection `{coprojection}` does not fit the cone: {reason}")]
    MalformedCone {
        coprojection: String,
        reason: String,
    },
    #[error("cone on `{0}` has a different base span")]
    BaseMismatch(String),
    #[error("cone on `{vertex}` is not a pushout: {certificate}")]
    NotAPushout {
        vertex: String,
        certificate: Certificate,
    },
}

impl PushoutError {
    pub fn code(&self) -> &'static str {
        match self {
            PushoutError::Category(
                CategoryError::UnknownSpecification(_) | CategoryError::UnknownMorphism(_),
            ) => "UnknownEntity",
            PushoutError::Category(e) => e.code(),
            PushoutError::MalformedSpan { .. } => "MalformedSpan",
            PushoutError::CompositeLegTarget { .. } => "CompositeLegTarget",
            PushoutError::KindClash { .. } => "KindClash",
            PushoutError::NameTaken(_) => "NameTaken",
            PushoutError::NonCommutingCone { .. } => "NonCommutingCone",
            PushoutError::MalformedCone { .. } => "MalformedCone",
            PushoutError::BaseMismatch(_) => "BaseMismatch",
            PushoutError::NotAPushout { .. } => "NotAPushout",
        }
    }
}

/// Default coprojection names for a computed vertex.
pub fn coprojection_names(vertex: &str) -> (String, String) {
    (format!("inl_{vertex}"), format!("inr_{vertex}"))
}

fn leg_morphism(d: &Diagram, span: &Span, leg: Leg) -> Result<Morphism, PushoutError> {
    let path = span.leg(leg);
    let m = d.path_morphism(path)?;
    if m.source != span.apex {
        return Err(PushoutError::MalformedSpan {
            leg: path.to_string(),
            apex: span.apex.clone(),
        });
    }
    Ok(m)
}

fn vertex_kind(y1: &Specification, y2: &Specification, vertex: &Specification) -> SpecKind {
    match (y1.kind, y2.kind) {
        (a, b)
            if a == b
                && matches!(
                    a,
                    SpecKind::Unit | SpecKind::BuiltinType | SpecKind::TypeParameter
                ) =>
        {
            a
        }
        (SpecKind::Object, _) | (_, SpecKind::Object) => SpecKind::Object,
        _ if vertex
            .members()
            .any(|m| m.kind == MemberKind::PureVirtualMethod) =>
        {
            SpecKind::AbstractClass
        }
        _ => SpecKind::Class,
    }
}

/// The canonical pushout of `span` without any name checks against `d`.
fn glue(
    d: &Diagram,
    span: &Span,
    vertex_name: &str,
    policy: NamingPolicy,
) -> Result<PushoutResult, PushoutError> {
    let apex = d.spec(&span.apex)?;
    let f1 = leg_morphism(d, span, Leg::Left)?;
    let f2 = leg_morphism(d, span, Leg::Right)?;
    let y1 = d.spec(&f1.target)?;
    let y2 = d.spec(&f2.target)?;

    let left_names: Vec<&str> = y1.member_names().collect();
    let right_names: Vec<&str> = y2.member_names().collect();
    let index = |names: &[&str], leg: &Morphism, x: &str| -> Result<usize, PushoutError> {
        let expr = leg.image(x).ok_or_else(|| CategoryError::UnknownMember {
            morphism: leg.name.clone(),
            member: x.to_owned(),
        })?;
        let target = expr
            .as_single()
            .ok_or_else(|| PushoutError::CompositeLegTarget {
                leg: leg.name.clone(),
                member: x.to_owned(),
            })?;
        names.binary_search(&target).map_err(|_| {
            CategoryError::UnknownMember {
                morphism: leg.name.clone(),
                member: target.to_owned(),
            }
            .into()
        })
    };
    let mut pairs = Vec::with_capacity(apex.len());
    for x in apex.member_names() {
        pairs.push((index(&left_names, &f1, x)?, index(&right_names, &f2, x)?));
    }

    let am = amalgamate(left_names.len(), right_names.len(), pairs);
    let names = class_names(&am, &y1.name, &left_names, &y2.name, &right_names, policy);

    let origin_of = |element: usize| -> (Origin, &Member) {
        let (leg, i) = am.split(element);
        let (spec, names) = match leg {
            Leg::Left => (y1, &left_names),
            Leg::Right => (y2, &right_names),
        };
        let member = spec.member(names[i]).expect("indexed member");
        (
            Origin {
                leg,
                spec: spec.name.clone(),
                member: member.name.clone(),
            },
            member,
        )
    };

    let mut vertex = Specification::new(vertex_name, SpecKind::Class);
    let mut provenance = BTreeMap::new();
    for (class, name) in am.classes().iter().zip(&names) {
        let parts: Vec<(Origin, &Member)> = class.iter().map(|&e| origin_of(e)).collect();
        let mut kind = parts[0].1.kind;
        for (origin, member) in &parts[1..] {
            kind = kind
                .unify(member.kind)
                .ok_or_else(|| PushoutError::KindClash {
                    member: name.clone(),
                    first: format!("{} ({})", parts[0].0, parts[0].1.kind),
                    second: format!("{origin} ({})", member.kind),
                })?;
        }
        let representative = parts
            .iter()
            .map(|(_, m)| *m)
            .find(|m| m.kind == kind)
            .unwrap_or(parts[0].1);
        let mut member = representative.renamed(name.clone());
        member.kind = kind;
        vertex.insert_member(member);
        provenance.insert(name.clone(), parts.into_iter().map(|(o, _)| o).collect());
    }
    vertex.kind = vertex_kind(y1, y2, &vertex);

    let (inl, inr) = coprojection_names(vertex_name);
    let mut left_coproj = Morphism::new(inl, &y1.name, vertex_name, MorphismKind::Coprojection);
    for (i, m) in left_names.iter().enumerate() {
        left_coproj = left_coproj.map_single(*m, names[am.class_of_left(i)].clone());
    }
    let mut right_coproj = Morphism::new(inr, &y2.name, vertex_name, MorphismKind::Coprojection);
    for (j, m) in right_names.iter().enumerate() {
        right_coproj = right_coproj.map_single(*m, names[am.class_of_right(j)].clone());
    }

    let added_equation = Equation::new(
        span.left.then(&left_coproj.name),
        span.right.then(&right_coproj.name),
    );
    Ok(PushoutResult {
        cone: Cone {
            base: span.clone(),
            vertex: vertex_name.to_owned(),
            left_coproj: left_coproj.name.clone(),
            right_coproj: right_coproj.name.clone(),
        },
        vertex,
        left_coproj,
        right_coproj,
        provenance,
        added_equation,
        support_specs: Vec::new(),
        support_morphisms: Vec::new(),
    })
}

/// Pushout of `span` with a fresh vertex called `vertex_name`.
pub fn compute_pushout(
    d: &Diagram,
    span: &Span,
    vertex_name: &str,
) -> Result<PushoutResult, PushoutError> {
    compute_pushout_with(d, span, vertex_name, NamingPolicy::Qualified)
}

pub fn compute_pushout_with(
    d: &Diagram,
    span: &Span,
    vertex_name: &str,
    policy: NamingPolicy,
) -> Result<PushoutResult, PushoutError> {
    if d.specs.contains_key(vertex_name) {
        return Err(PushoutError::NameTaken(vertex_name.to_owned()));
    }
    let (inl, inr) = coprojection_names(vertex_name);
    for name in [inl, inr] {
        if d.morphisms.contains_key(&name) {
            return Err(PushoutError::NameTaken(name));
        }
    }
    glue(d, span, vertex_name, policy)
}

fn check_coprojections(d: &Diagram, c: &Cone) -> Result<(Morphism, Morphism), PushoutError> {
    let mut out = Vec::with_capacity(2);
    for leg in [Leg::Left, Leg::Right] {
        let (_, leg_target) = d.path_endpoints(c.base.leg(leg))?;
        let g = d.morphism(c.coproj(leg))?;
        d.spec(&c.vertex)?;
        if g.source != leg_target || g.target != c.vertex {
            return Err(PushoutError::MalformedCone {
                coprojection: g.name.clone(),
                reason: format!(
                    "expected {leg_target} -> {}, found {} -> {}",
                    c.vertex, g.source, g.target
                ),
            });
        }
        out.push(g.clone());
    }
    let right = out.pop().expect("two coprojections");
    let left = out.pop().expect("two coprojections");
    Ok((left, right))
}

/// First apex member on which the two sides of the square disagree.
fn commuting_witness(d: &Diagram, c: &Cone) -> Result<Option<String>, PushoutError> {
    check_coprojections(d, c)?;
    let lhs = d.path_morphism(&c.base.left.then(&c.left_coproj))?;
    let rhs = d.path_morphism(&c.base.right.then(&c.right_coproj))?;
    let apex = d.spec(&c.base.apex)?;
    Ok(apex
        .member_names()
        .find(|x| lhs.image(x) != rhs.image(x))
        .map(str::to_owned))
}

/// Whether `g1.f1` and `g2.f2` agree member for member.
pub fn verify_cone_commutes(d: &Diagram, c: &Cone) -> Result<bool, PushoutError> {
    Ok(commuting_witness(d, c)?.is_none())
}

fn fresh_name(d: &Diagram, base: &str) -> String {
    let mut name = format!("{base}~canonical");
    let mut n = 0;
    while d.specs.contains_key(&name) {
        n += 1;
        name = format!("{base}~canonical{n}");
    }
    name
}

/// Compares a commuting cone with the canonical pushout of its base.
pub fn is_pushout(d: &Diagram, c: &Cone) -> Result<PushoutVerdict, PushoutError> {
    if let Some(member) = commuting_witness(d, c)? {
        return Err(PushoutError::NonCommutingCone {
            vertex: c.vertex.clone(),
            member,
        });
    }
    let canonical = glue(
        d,
        &c.base,
        &fresh_name(d, &c.vertex),
        NamingPolicy::Qualified,
    )?;
    let (g1, g2) = check_coprojections(d, c)?;
    let vertex = d.spec(&c.vertex)?;
    let verdict = |certificate| PushoutVerdict {
        is_pushout: false,
        certificate,
    };

    let mut comparison: BTreeMap<String, String> = BTreeMap::new();
    let mut preimage: BTreeMap<String, String> = BTreeMap::new();
    for (member, origins) in &canonical.provenance {
        let origin = &origins[0];
        let g = if origin.leg == Leg::Left { &g1 } else { &g2 };
        let image = g
            .image(&origin.member)
            .ok_or_else(|| CategoryError::UnknownMember {
                morphism: g.name.clone(),
                member: origin.member.clone(),
            })?;
        let Some(image) = image.as_single() else {
            return Ok(verdict(Certificate::CompositeImage {
                member: origin.member.clone(),
            }));
        };
        if let Some(first) = preimage.get(image) {
            return Ok(verdict(Certificate::OverIdentification {
                first: first.clone(),
                second: member.clone(),
                image: image.to_owned(),
            }));
        }
        let expected = canonical.vertex.member(member).expect("vertex member").kind;
        let found = vertex
            .member(image)
            .ok_or_else(|| CategoryError::UnknownMember {
                morphism: g.name.clone(),
                member: image.to_owned(),
            })?
            .kind;
        if expected != found {
            return Ok(verdict(Certificate::KindMismatch {
                member: image.to_owned(),
                expected,
                found,
            }));
        }
        preimage.insert(image.to_owned(), member.clone());
        comparison.insert(member.clone(), image.to_owned());
    }
    if let Some(extra) = vertex.member_names().find(|m| !preimage.contains_key(*m)) {
        return Ok(verdict(Certificate::ExtraMember {
            member: extra.to_owned(),
        }));
    }
    Ok(PushoutVerdict {
        is_pushout: true,
        certificate: Certificate::Isomorphism { comparison },
    })
}

/// Reads a declared cone as a pushout result, failing if it is not a pushout.
pub fn recognize_pushout(d: &Diagram, c: &Cone) -> Result<PushoutResult, PushoutError> {
    let verdict = is_pushout(d, c)?;
    let Certificate::Isomorphism { comparison } = verdict.certificate else {
        return Err(PushoutError::NotAPushout {
            vertex: c.vertex.clone(),
            certificate: verdict.certificate,
        });
    };
    let canonical = glue(
        d,
        &c.base,
        &fresh_name(d, &c.vertex),
        NamingPolicy::Qualified,
    )?;
    let provenance = canonical
        .provenance
        .into_iter()
        .map(|(member, origins)| (comparison[&member].clone(), origins))
        .collect();
    Ok(PushoutResult {
        cone: c.clone(),
        vertex: d.spec(&c.vertex)?.clone(),
        left_coproj: d.morphism(&c.left_coproj)?.clone(),
        right_coproj: d.morphism(&c.right_coproj)?.clone(),
        provenance,
        added_equation: Equation::new(
            c.base.left.then(&c.left_coproj),
            c.base.right.then(&c.right_coproj),
        ),
        support_specs: Vec::new(),
        support_morphisms: Vec::new(),
    })
}

/// The unique `h: Z -> Z'` with `h.g1 = g1'` and `h.g2 = g2'`.
pub fn mediating_morphism(
    d: &Diagram,
    p: &PushoutResult,
    other: &Cone,
) -> Result<Morphism, PushoutError> {
    if other.base != p.cone.base {
        return Err(PushoutError::BaseMismatch(other.vertex.clone()));
    }
    if let Some(member) = commuting_witness(d, other)? {
        return Err(PushoutError::NonCommutingCone {
            vertex: other.vertex.clone(),
            member,
        });
    }
    let (g1, g2) = check_coprojections(d, other)?;
    let mut h = Morphism::new(
        format!("h_{}_{}", p.vertex.name, other.vertex),
        &p.vertex.name,
        &other.vertex,
        MorphismKind::Mediating,
    );
    for (member, origins) in &p.provenance {
        // joint surjectivity: every vertex member has an origin
        let origin = &origins[0];
        let g = if origin.leg == Leg::Left { &g1 } else { &g2 };
        let image: MemberExpr =
            g.image(&origin.member)
                .cloned()
                .ok_or_else(|| CategoryError::UnknownMember {
                    morphism: g.name.clone(),
                    member: origin.member.clone(),
                })?;
        h.mapping.insert(member.clone(), image);
    }
    Ok(h)
}

/// Steps of the leg opposite to `side`, with their kinds.
///
/// The coprojection on one side is the image of the opposite leg under the
/// pushout, so it inherits that leg's decomposition.
pub fn coprojection_decomposition(
    d: &Diagram,
    c: &Cone,
    side: Leg,
) -> Result<Vec<(String, MorphismKind)>, PushoutError> {
    let opposite = match side {
        Leg::Left => &c.base.right,
        Leg::Right => &c.base.left,
    };
    opposite
        .steps()
        .iter()
        .map(|s| Ok((s.clone(), d.morphism(s)?.kind)))
        .collect()
}

/// Partition of the leg-target members induced by a result, for comparisons.
pub fn provenance_partition(p: &PushoutResult) -> BTreeSet<BTreeSet<(Leg, String)>> {
    p.provenance
        .values()
        .map(|origins| origins.iter().map(|o| (o.leg, o.member.clone())).collect())
        .collect()
}
