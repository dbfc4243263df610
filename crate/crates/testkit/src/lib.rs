//! Random generators and brute-force oracles shared by the dml test suites.
//!
//! The oracles here deliberately avoid the union-find and naming code of
//! `dml-core`: they work on explicit relations and exhaustive enumeration.

use std::collections::{BTreeMap, BTreeSet};

use dml_core::graph::{GraphMorphism, PlainGraph};
use dml_core::pushout::Leg;
use dml_core::{
    Cone, Diagram, Equation, Member, MemberExpr, MemberKind, Morphism, MorphismKind, Path, Span,
    SpecKind, Specification,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// A diagram holding one span `Y1 <-f1- X -f2-> Y2`.
#[derive(Debug, Clone)]
pub struct SpanCase {
    pub diagram: Diagram,
    pub span: Span,
}

fn random_kind<R: Rng>(rng: &mut R) -> MemberKind {
    if rng.gen_bool(0.3) {
        MemberKind::PureVirtualMethod
    } else {
        MemberKind::Method
    }
}

fn random_class<R: Rng>(rng: &mut R, name: &str, size: usize, prefix: &str) -> Specification {
    // a small name pool on purpose: clashing names across specs exercise naming
    let mut s = Specification::new(name, SpecKind::Class);
    for i in 0..size {
        let member = if rng.gen_bool(0.5) {
            format!("m{i}")
        } else {
            format!("{prefix}{i}")
        };
        s.insert_member(Member::new(member, random_kind(rng)));
    }
    s
}

fn random_map<R: Rng>(
    rng: &mut R,
    name: &str,
    source: &Specification,
    target: &Specification,
) -> Morphism {
    let targets: Vec<&str> = target.member_names().collect();
    let mut m = Morphism::new(name, &source.name, &target.name, MorphismKind::Generic);
    for x in source.member_names() {
        m = m.map_single(x, *targets.choose(rng).expect("non-empty target"));
    }
    m
}

/// Span with at most `max_apex` apex members and between one and
/// `max_target` members in each leg target; legs are arbitrary maps.
pub fn random_span<R: Rng>(rng: &mut R, max_apex: usize, max_target: usize) -> SpanCase {
    let sizes = (
        rng.gen_range(0..=max_apex),
        rng.gen_range(1..=max_target),
        rng.gen_range(1..=max_target),
    );
    let x = random_class(rng, "X", sizes.0, "a");
    let y1 = random_class(rng, "Y1", sizes.1, "b");
    let y2 = random_class(rng, "Y2", sizes.2, "c");
    let f1 = random_map(rng, "f1", &x, &y1);
    let f2 = random_map(rng, "f2", &x, &y2);
    SpanCase {
        diagram: Diagram::new()
            .with_spec(x)
            .with_spec(y1)
            .with_spec(y2)
            .with_morphism(f1)
            .with_morphism(f2),
        span: Span::of("X", "f1", "f2"),
    }
}

fn single(m: &Morphism, x: &str) -> String {
    m.image_single(x).expect("single-valued leg").to_owned()
}

/// Classes of leg-target members identified by the span, computed as the
/// reflexive-symmetric-transitive closure of the relation `f1(a) ~ f2(a)`
/// with Warshall's algorithm.
pub fn oracle_partition(d: &Diagram, span: &Span) -> BTreeSet<BTreeSet<(Leg, String)>> {
    let f1 = d.path_morphism(&span.left).expect("left leg");
    let f2 = d.path_morphism(&span.right).expect("right leg");
    let y1 = &d.specs[&f1.target];
    let y2 = &d.specs[&f2.target];
    let elements: Vec<(Leg, String)> = y1
        .member_names()
        .map(|n| (Leg::Left, n.to_owned()))
        .chain(y2.member_names().map(|n| (Leg::Right, n.to_owned())))
        .collect();
    let index = |e: &(Leg, String)| elements.iter().position(|x| x == e).expect("element");
    let n = elements.len();
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for a in d.specs[&span.apex].member_names() {
        let i = index(&(Leg::Left, single(&f1, a)));
        let j = index(&(Leg::Right, single(&f2, a)));
        rel[i][j] = true;
        rel[j][i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if rel[i][k] {
                let via = rel[k].clone();
                for (cell, reach) in rel[i].iter_mut().zip(via) {
                    *cell |= reach;
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| rel[i][j])
                .map(|j| elements[j].clone())
                .collect()
        })
        .collect()
}

/// A span completed by a commuting cone into `W`.
#[derive(Debug, Clone)]
pub struct ConeCase {
    pub diagram: Diagram,
    pub cone: Cone,
}

/// Commuting cone over a small random span: each identified class of the
/// oracle partition is sent to a random member of `W`, which may also carry
/// members outside the image.
pub fn random_cone<R: Rng>(
    rng: &mut R,
    max_apex: usize,
    max_target: usize,
    max_vertex: usize,
) -> ConeCase {
    let case = random_span(rng, max_apex, max_target);
    let classes = oracle_partition(&case.diagram, &case.span);
    let size = rng.gen_range(1..=max_vertex);
    let mut w = Specification::new("W", SpecKind::Class);
    for i in 0..size {
        w.insert_member(Member::method(format!("w{i}"), Vec::<String>::new()));
    }
    let mut g1 = Morphism::new("g1", "Y1", "W", MorphismKind::Generic);
    let mut g2 = Morphism::new("g2", "Y2", "W", MorphismKind::Generic);
    for class in &classes {
        let image = format!("w{}", rng.gen_range(0..size));
        for (leg, member) in class {
            let g = if *leg == Leg::Left { &mut g1 } else { &mut g2 };
            g.mapping
                .insert(member.clone(), MemberExpr::single(image.clone()));
        }
    }
    let diagram = case
        .diagram
        .with_spec(w)
        .with_morphism(g1)
        .with_morphism(g2);
    ConeCase {
        diagram,
        cone: Cone {
            base: case.span,
            vertex: "W".into(),
            left_coproj: "g1".into(),
            right_coproj: "g2".into(),
        },
    }
}

/// Every map `P -> W` (as member-name maps) with `h.inl = g1` and
/// `h.inr = g2`, found by enumerating all `|W|^|P|` functions.
pub fn enumerate_mediators(
    vertex: &Specification,
    inl: &Morphism,
    inr: &Morphism,
    w: &Specification,
    g1: &Morphism,
    g2: &Morphism,
) -> Vec<BTreeMap<String, String>> {
    let domain: Vec<&str> = vertex.member_names().collect();
    let codomain: Vec<&str> = w.member_names().collect();
    let mut found = Vec::new();
    if codomain.is_empty() && !domain.is_empty() {
        return found;
    }
    let mut digits = vec![0usize; domain.len()];
    loop {
        let h: BTreeMap<&str, &str> = domain
            .iter()
            .zip(&digits)
            .map(|(x, &i)| (*x, codomain[i]))
            .collect();
        let agrees = |p: &Morphism, g: &Morphism| {
            p.mapping.iter().all(|(y, img)| {
                img.as_single().and_then(|v| h.get(v)).copied() == g.image_single(y)
            })
        };
        if agrees(inl, g1) && agrees(inr, g2) {
            found.push(
                h.iter()
                    .map(|(a, b)| (a.to_string(), b.to_string()))
                    .collect(),
            );
        }
        // next digit vector in base |W|
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return found;
            }
            digits[pos] += 1;
            if digits[pos] < codomain.len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// The map between two pushout vertices determined by the coprojections,
/// `b(inl(y)) = inl'(y)` and `b(inr(y)) = inr'(y)`, checked to be a
/// well-defined, kind-preserving bijection.
pub fn coprojection_bijection(
    (v, inl, inr): (&Specification, &Morphism, &Morphism),
    (w, inl2, inr2): (&Specification, &Morphism, &Morphism),
) -> Result<BTreeMap<String, String>, String> {
    let mut b: BTreeMap<String, String> = BTreeMap::new();
    for (p, q) in [(inl, inl2), (inr, inr2)] {
        for (y, img) in &p.mapping {
            let from = img
                .as_single()
                .ok_or_else(|| format!("{y} has a composite image"))?;
            let to = q
                .image_single(y)
                .ok_or_else(|| format!("{y} has no single image in {}", q.name))?;
            if let Some(prev) = b.insert(from.to_owned(), to.to_owned()) {
                if prev != to {
                    return Err(format!("{from} is sent to both {prev} and {to}"));
                }
            }
        }
    }
    if b.len() != v.len() {
        return Err(format!("{} of {} members reached", b.len(), v.len()));
    }
    let image: BTreeSet<&String> = b.values().collect();
    if image.len() != b.len() || image.len() != w.len() {
        return Err("not a bijection".into());
    }
    for (x, y) in &b {
        let (kx, ky) = (v.member(x).map(|m| m.kind), w.member(y).map(|m| m.kind));
        if kx.is_none() || kx != ky {
            return Err(format!("{x} and {y} differ in kind"));
        }
    }
    Ok(b)
}

const NAME_PARTS: &[&str] = &[
    "A",
    "Zp",
    "F2",
    "x",
    "Envelope<Zp>",
    "T<A>",
    "A+g",
    "2",
    "spec",
    "kind",
    "id",
    "Y1::m1",
    "a b",
    "λ",
    "q\"t",
    "back\\slash",
    "two-words",
    "_u",
    "n9",
    "tab\there",
];

fn random_name<R: Rng>(rng: &mut R, taken: &BTreeSet<String>) -> String {
    loop {
        let mut name = (*NAME_PARTS.choose(rng).expect("parts")).to_owned();
        if rng.gen_bool(0.5) {
            name.push_str(&rng.gen_range(0..100).to_string());
        }
        if !taken.contains(&name) {
            return name;
        }
    }
}

fn random_member<R: Rng>(rng: &mut R, name: String, sorts: &[String]) -> Member {
    let sig = |rng: &mut R| -> Vec<String> {
        let n = rng.gen_range(0..3);
        (0..n)
            .map(|_| sorts.choose(rng).cloned().unwrap_or_else(|| "int".into()))
            .collect()
    };
    let mut m = match rng.gen_range(0..7) {
        0 => Member::method(name, sig(rng)),
        1 => Member::pure_method(name, sig(rng)),
        2 => Member::constructor(name, sig(rng)),
        3 => Member::destructor(name),
        4 => Member::new(name, MemberKind::Field).with_signature(sig(rng).into_iter().take(1)),
        5 => Member::type_member(name).with_signature(sig(rng).into_iter().take(1)),
        _ => {
            let sort = sorts.choose(rng).cloned().unwrap_or_else(|| "int".into());
            let literal = if rng.gen_bool(0.5) {
                rng.gen_range(-5i32..50).to_string()
            } else {
                random_name(rng, &BTreeSet::new())
            };
            Member::value(name, sort, literal)
        }
    };
    if rng.gen_bool(0.1) {
        m = m.generic();
    }
    if rng.gen_bool(0.1) {
        m = m.indirect();
    }
    m
}

fn random_spec<R: Rng>(rng: &mut R, name: String, sorts: &[String]) -> Specification {
    let kind = *[
        SpecKind::Class,
        SpecKind::AbstractClass,
        SpecKind::GenericClass,
        SpecKind::BuiltinType,
        SpecKind::Object,
        SpecKind::TypeParameter,
        SpecKind::Unit,
    ]
    .choose(rng)
    .expect("kinds");
    let mut s = if kind == SpecKind::GenericClass {
        Specification::generic(
            name,
            [sorts.choose(rng).cloned().unwrap_or_else(|| "B".into())],
        )
    } else {
        Specification::new(name, kind)
    };
    if kind == SpecKind::Unit {
        return s;
    }
    let mut taken = BTreeSet::new();
    for _ in 0..rng.gen_range(0..5) {
        let n = random_name(rng, &taken);
        taken.insert(n.clone());
        s.insert_member(random_member(rng, n, sorts));
    }
    if kind == SpecKind::AbstractClass
        && !s.members().any(|m| m.kind == MemberKind::PureVirtualMethod)
    {
        let n = random_name(rng, &taken);
        s.insert_member(Member::pure_method(n, Vec::<String>::new()));
    }
    s
}

fn morphism_kind<R: Rng>(rng: &mut R) -> MorphismKind {
    *[
        MorphismKind::Generic,
        MorphismKind::Implementation,
        MorphismKind::TemplateParameter,
        MorphismKind::Instantiation,
        MorphismKind::Value,
        MorphismKind::Coprojection,
    ]
    .choose(rng)
    .expect("kinds")
}

/// A well-formed diagram with awkward names, every member form, explicit
/// mappings (some composite), equations, spans and elaborated pushouts.
pub fn random_diagram<R: Rng>(rng: &mut R) -> Diagram {
    let mut d = Diagram::new();
    let mut names = BTreeSet::new();
    let n_specs = rng.gen_range(0..6);
    let mut spec_names = Vec::new();
    for _ in 0..n_specs {
        let name = random_name(rng, &names);
        names.insert(name.clone());
        spec_names.push(name);
    }
    for name in &spec_names {
        let s = random_spec(rng, name.clone(), &spec_names);
        d.add_spec(s);
    }

    let mut morphism_names = BTreeSet::new();
    for _ in 0..rng.gen_range(0..6) {
        let (Some(src), Some(tgt)) = (spec_names.choose(rng), spec_names.choose(rng)) else {
            break;
        };
        let (src, tgt) = (&d.specs[src], &d.specs[tgt]);
        let targets: Vec<&str> = tgt.member_names().collect();
        if targets.is_empty() && !src.is_empty() {
            continue;
        }
        let name = random_name(rng, &morphism_names);
        morphism_names.insert(name.clone());
        let mut m = Morphism::new(name, &src.name, &tgt.name, morphism_kind(rng));
        for x in src.member_names() {
            let first = *targets.choose(rng).expect("non-empty");
            let expr = if rng.gen_bool(0.15) {
                MemberExpr::new([first.to_owned(), random_name(rng, &BTreeSet::new())])
                    .expect("two steps")
            } else {
                MemberExpr::single(first)
            };
            m = m.map(x, expr);
        }
        d.add_morphism(m);
    }

    let morphisms: Vec<Morphism> = d.morphisms.values().cloned().collect();
    for m in &morphisms {
        if rng.gen_bool(0.3) {
            d.equations
                .push(Equation::new(Path::single(&m.name), Path::single(&m.name)));
        }
    }
    if !d.specs.is_empty() && rng.gen_bool(0.3) {
        let s = spec_names.choose(rng).expect("spec");
        d.equations.push(Equation::new(
            Path::Identity(s.clone()),
            Path::Identity(s.clone()),
        ));
    }

    // spans and pushouts over pairs of morphisms with a common source
    for (i, a) in morphisms.iter().enumerate() {
        for b in &morphisms[i..] {
            if a.source != b.source || !rng.gen_bool(0.4) {
                continue;
            }
            let span = Span::of(&a.source, &a.name, &b.name);
            if rng.gen_bool(0.5) {
                let name = random_name(rng, &d.spans.keys().cloned().collect());
                d.spans.insert(name, span.clone());
            }
            if rng.gen_bool(0.5) {
                let vertex = random_name(rng, &names);
                if let Ok(p) = dml_core::compute_pushout(&d, &span, &vertex) {
                    names.insert(vertex);
                    d = p.extend(&d);
                }
            }
        }
    }

    // composite images and generated names may break well-formedness;
    // drop offending morphisms until the diagram validates
    loop {
        let violations = dml_core::validate_diagram(&d);
        if violations.is_empty() {
            return d;
        }
        let bad: BTreeSet<String> = violations.iter().map(|v| v.entity.clone()).collect();
        let before = (
            d.morphisms.len(),
            d.equations.len(),
            d.spans.len(),
            d.pushouts.len(),
            d.specs.len(),
        );
        d.morphisms.retain(|k, _| !bad.contains(k));
        d.pushouts
            .retain(|k, p| !bad.contains(k) && !bad.contains(&p.vertex));
        d.spans.retain(|k, _| !bad.contains(k));
        let morphisms = d.morphisms.clone();
        let known = |p: &Path| p.steps().iter().all(|s| morphisms.contains_key(s));
        d.equations.retain(|e| known(&e.lhs) && known(&e.rhs));
        let morphisms = d.morphisms.clone();
        let keep = |s: &Span| {
            [&s.left, &s.right]
                .iter()
                .all(|p| p.steps().iter().all(|x| morphisms.contains_key(x)))
        };
        d.spans.retain(|_, s| keep(s));
        d.pushouts.retain(|_, p| {
            keep(&p.span)
                && p.coprojections
                    .as_ref()
                    .is_none_or(|(l, r)| morphisms.contains_key(l) && morphisms.contains_key(r))
        });
        let after = (
            d.morphisms.len(),
            d.equations.len(),
            d.spans.len(),
            d.pushouts.len(),
            d.specs.len(),
        );
        if before == after {
            // nothing attributable: fall back to the specs alone
            d.morphisms.clear();
            d.equations.clear();
            d.spans.clear();
            d.pushouts.clear();
            if !dml_core::validate_diagram(&d).is_empty() {
                d.specs.clear();
            }
        }
    }
}

/// Shared core `K` and three graphs containing it, for gluing tests.
#[derive(Debug, Clone)]
pub struct GraphTriple {
    pub core: PlainGraph,
    pub graphs: [PlainGraph; 3],
}

fn extend_graph<R: Rng>(rng: &mut R, core: &PlainGraph, name: &str) -> PlainGraph {
    let mut g = core.clone();
    g.name = name.to_owned();
    for i in 0..rng.gen_range(0..3) {
        // names may repeat across graphs
        g.nodes.insert(format!("n{}", i + rng.gen_range(0..2) * 10));
    }
    let nodes: Vec<String> = g.nodes.iter().cloned().collect();
    for i in 0..rng.gen_range(0..3) {
        let (s, t) = (
            nodes.choose(rng).expect("node").clone(),
            nodes.choose(rng).expect("node").clone(),
        );
        let e = format!("e{i}");
        g.edges.entry(e).or_insert((s, t));
    }
    g
}

pub fn random_graph_triple<R: Rng>(rng: &mut R) -> GraphTriple {
    let mut core = PlainGraph::new("K");
    for i in 0..rng.gen_range(1..4) {
        core.nodes.insert(format!("k{i}"));
    }
    let nodes: Vec<String> = core.nodes.iter().cloned().collect();
    for i in 0..rng.gen_range(0..3) {
        let (s, t) = (
            nodes.choose(rng).expect("node").clone(),
            nodes.choose(rng).expect("node").clone(),
        );
        core.edges.insert(format!("c{i}"), (s, t));
    }
    let graphs = [
        extend_graph(rng, &core, "G1"),
        extend_graph(rng, &core, "G2"),
        extend_graph(rng, &core, "G3"),
    ];
    GraphTriple { core, graphs }
}

/// `g` after `f`.
pub fn compose_graph_morphisms(f: &GraphMorphism, g: &GraphMorphism) -> GraphMorphism {
    GraphMorphism {
        nodes: f
            .nodes
            .iter()
            .map(|(k, v)| (k.clone(), g.nodes[v].clone()))
            .collect(),
        edges: f
            .edges
            .iter()
            .map(|(k, v)| (k.clone(), g.edges[v].clone()))
            .collect(),
    }
}

/// Checks that `phi` is a bijective graph morphism from `a` onto `b`.
pub fn is_graph_isomorphism(phi: &GraphMorphism, a: &PlainGraph, b: &PlainGraph) -> bool {
    let total = a
        .nodes
        .iter()
        .all(|n| phi.nodes.get(n).is_some_and(|m| b.nodes.contains(m)))
        && a.edges
            .keys()
            .all(|e| phi.edges.get(e).is_some_and(|f| b.edges.contains_key(f)));
    if !total || a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let node_image: BTreeSet<&String> = a.nodes.iter().map(|n| &phi.nodes[n]).collect();
    let edge_image: BTreeSet<&String> = a.edges.keys().map(|e| &phi.edges[e]).collect();
    node_image.len() == b.nodes.len()
        && edge_image.len() == b.edges.len()
        && a.edges.iter().all(|(e, (s, t))| {
            let (fs, ft) = &b.edges[&phi.edges[e]];
            &phi.nodes[s] == fs && &phi.nodes[t] == ft
        })
}

/// Builds the map `phi: A -> B` generated by pairs `(a(x), b(x))` over the
/// given morphism pairs, or `None` when the pairs disagree.
pub fn induced_graph_map(pairs: &[(&GraphMorphism, &GraphMorphism)]) -> Option<GraphMorphism> {
    let mut phi = GraphMorphism {
        nodes: BTreeMap::new(),
        edges: BTreeMap::new(),
    };
    for (a, b) in pairs {
        for (x, ax) in &a.nodes {
            let bx = b.nodes.get(x)?;
            if phi
                .nodes
                .insert(ax.clone(), bx.clone())
                .is_some_and(|prev| &prev != bx)
            {
                return None;
            }
        }
        for (x, ax) in &a.edges {
            let bx = b.edges.get(x)?;
            if phi
                .edges
                .insert(ax.clone(), bx.clone())
                .is_some_and(|prev| &prev != bx)
            {
                return None;
            }
        }
    }
    Some(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn partition_of_a_chain() {
        let x = Specification::new("X", SpecKind::Class)
            .with_member(Member::method("a0", Vec::<String>::new()))
            .with_member(Member::method("a1", Vec::<String>::new()));
        let y1 = Specification::new("Y1", SpecKind::Class)
            .with_member(Member::method("p", Vec::<String>::new()))
            .with_member(Member::method("q", Vec::<String>::new()));
        let y2 = Specification::new("Y2", SpecKind::Class)
            .with_member(Member::method("r", Vec::<String>::new()));
        let d = Diagram::new()
            .with_spec(x)
            .with_spec(y1)
            .with_spec(y2)
            .with_morphism(
                Morphism::new("f1", "X", "Y1", MorphismKind::Generic)
                    .map_single("a0", "p")
                    .map_single("a1", "q"),
            )
            .with_morphism(
                Morphism::new("f2", "X", "Y2", MorphismKind::Generic)
                    .map_single("a0", "r")
                    .map_single("a1", "r"),
            );
        let classes = oracle_partition(&d, &Span::of("X", "f1", "f2"));
        assert_eq!(classes.len(), 1);
        assert_eq!(classes.iter().next().unwrap().len(), 3);
    }

    #[test]
    fn generated_diagrams_validate() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            assert!(dml_core::validate_diagram(&random_diagram(&mut rng)).is_empty());
        }
    }

    #[test]
    fn enumeration_counts_all_maps() {
        let p = Specification::new("P", SpecKind::Class)
            .with_member(Member::method("x", Vec::<String>::new()));
        let w = Specification::new("W", SpecKind::Class)
            .with_member(Member::method("u", Vec::<String>::new()))
            .with_member(Member::method("v", Vec::<String>::new()));
        let empty = Morphism::new("e", "Y", "P", MorphismKind::Generic);
        let g = Morphism::new("g", "Y", "W", MorphismKind::Generic);
        assert_eq!(enumerate_mediators(&p, &empty, &empty, &w, &g, &g).len(), 2);
    }
}
