//! Exit gate: one PASS/FAIL line per acceptance criterion.
//!
//! Randomized criteria use fixed seeds and fixed trial counts; every check is
//! exact (no tolerances apply: all quantities are discrete).

use std::collections::{BTreeMap, BTreeSet};

use dml_cli::run;
use dml_core::codegen::{emit_dot, emit_skeleton, Dialect};
use dml_core::constructs::{structural_diff, DiffItem};
use dml_core::graph::{graph_pushout, parameter_passing, GraphMorphism, PlainGraph};
use dml_core::pushout::provenance_partition;
use dml_core::{
    compose_morphisms, compute_pushout, compute_pushout_with, corpus, dsl, is_pushout,
    mediating_morphism, recognize_pushout, Certificate, Diagram, Member, Morphism, MorphismKind,
    NamingPolicy, Span, SpecKind, Specification,
};
use dml_testkit as kit;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SPAN_TRIALS: usize = 1000;
const CONE_TRIALS: usize = 200;
const NAMING_TRIALS: usize = 300;
const DIAGRAM_TRIALS: usize = 500;
const GRAPH_TRIALS: usize = 300;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn bundled(name: &str) -> Diagram {
    dsl::parse(corpus::get(name).expect("bundled")).expect("bundled file parses")
}

fn class(name: &str, members: &[&str]) -> Specification {
    Specification::new(name, SpecKind::Class).with_members(
        members
            .iter()
            .map(|m| Member::method(*m, Vec::<String>::new())),
    )
}

fn criterion_1() -> Outcome {
    let (x, y1, y2) = (
        class("X", &["m0"]),
        class("Y1", &["m0", "m1"]),
        class("Y2", &["m0", "m2"]),
    );
    let d = Diagram::new()
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
        .with_spec(x)
        .with_spec(y1)
        .with_spec(y2);
    let p = compute_pushout(&d, &Span::of("X", "f1", "f2"), "Z").map_err(|e| e.to_string())?;
    let members: Vec<&str> = p.vertex.member_names().collect();
    ensure(members == ["m0", "m1", "m2"], || {
        format!("vertex members {members:?}")
    })?;

    let diamond = bundled("virtual_inheritance.dml");
    let cone = diamond.pushouts["Z"].cone().ok_or("Z has no cone")?;
    let verdict = is_pushout(&diamond, &cone).map_err(|e| e.to_string())?;
    ensure(verdict.is_pushout, || {
        format!("declared Z rejected: {}", verdict.certificate)
    })?;

    let mut fat = diamond.clone();
    fat.specs
        .get_mut("Z")
        .unwrap()
        .insert_member(Member::method("m3", Vec::<String>::new()));
    let verdict = is_pushout(&fat, &cone).map_err(|e| e.to_string())?;
    ensure(!verdict.is_pushout, || {
        "Z with an extra member accepted".into()
    })?;
    ensure(
        verdict.certificate
            == Certificate::ExtraMember {
                member: "m3".into(),
            },
        || format!("witness {}", verdict.certificate),
    )?;
    Ok(
        "vertex {m0,m1,m2}; declared Z is a pushout; Z+m3 rejected with extra-member witness m3"
            .into(),
    )
}

fn criterion_2() -> Outcome {
    let r = run(["dml", "demo", "linbox-copy"]);
    ensure(r.exit_code == 0, || {
        format!("exit {}: {}", r.exit_code, r.report)
    })?;
    let vertices: BTreeSet<&str> = r.get_all("pushout.vertex").collect();
    let expected = BTreeSet::from(["A2", "E2", "Envelope<Zp>", "F2"]);
    ensure(vertices == expected, || format!("vertices {vertices:?}"))?;
    let certs: Vec<&str> = r.get_all("certificate.kind").collect();
    ensure(
        certs.len() == 4 && certs.iter().all(|c| *c == "isomorphism"),
        || format!("certificates {certs:?}"),
    )?;
    let middle = r.get("pattern.Envelope<Zp>");
    ensure(middle == Some("template-parameter-passing"), || {
        format!("Envelope<Zp> classified {middle:?}")
    })?;
    let kinds = r.get("coprojection.arch_a2.kinds");
    ensure(
        kinds == Some("inheritance,template-parameter,instantiation"),
        || format!("Archetype -> A2 decomposes as {kinds:?}"),
    )?;
    Ok("4/4 pushouts verified; Envelope<Zp> is template-parameter-passing; Archetype->A2 = inheritance;template-parameter;instantiation".into())
}

fn criterion_3() -> Outcome {
    let r = run(["dml", "demo", "linbox-inherit"]);
    ensure(r.exit_code == 0, || {
        format!("exit {}: {}", r.exit_code, r.report)
    })?;
    let certs: Vec<&str> = r.get_all("certificate.kind").collect();
    ensure(
        !certs.is_empty() && certs.iter().all(|c| *c == "isomorphism"),
        || format!("certificates {certs:?}"),
    )?;
    let diff: BTreeSet<DiffItem> =
        structural_diff(&bundled("linbox_copy.dml"), &bundled("linbox_inherit.dml"))
            .into_iter()
            .collect();
    let expected = BTreeSet::from([
        DiffItem::SpecRemoved("F2".into()),
        DiffItem::MorphismKindChanged {
            source: "Zp".into(),
            target: "Envelope<Zp>".into(),
            from: MorphismKind::TemplateParameter,
            to: MorphismKind::Inheritance,
        },
        DiffItem::ConstructionChanged {
            object: "E2".into(),
            from: vec!["&F2".into()],
            to: vec!["2".into()],
        },
    ]);
    ensure(diff == expected, || format!("diff {diff:?}"))?;
    Ok(format!(
        "{} pushouts verified; diff = {{-F2, Zp->Envelope<Zp> inheritance, E2(2)}}",
        certs.len()
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1A6_0004);
    for trial in 0..SPAN_TRIALS {
        let case = kit::random_span(&mut rng, 8, 12);
        let p = compute_pushout(&case.diagram, &case.span, "P")
            .map_err(|e| format!("trial {trial}: {e}"))?;
        let oracle = kit::oracle_partition(&case.diagram, &case.span);
        ensure(provenance_partition(&p) == oracle, || {
            format!("trial {trial}: partitions differ")
        })?;
    }
    Ok(format!(
        "{SPAN_TRIALS}/{SPAN_TRIALS} spans match the transitive-closure oracle"
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1A6_0005);
    let mut maps = 0usize;
    for trial in 0..CONE_TRIALS {
        let case = kit::random_cone(&mut rng, 3, 3, 3);
        let d = &case.diagram;
        let p =
            compute_pushout(d, &case.cone.base, "P").map_err(|e| format!("trial {trial}: {e}"))?;
        let h = mediating_morphism(d, &p, &case.cone).map_err(|e| format!("trial {trial}: {e}"))?;
        let (g1, g2) = (&d.morphisms["g1"], &d.morphisms["g2"]);
        let left = compose_morphisms(&p.left_coproj, &h).map_err(|e| e.to_string())?;
        let right = compose_morphisms(&p.right_coproj, &h).map_err(|e| e.to_string())?;
        ensure(
            left.mapping == g1.mapping && right.mapping == g2.mapping,
            || format!("trial {trial}: mediator does not commute"),
        )?;
        let w = &d.specs["W"];
        maps += w.len().pow(p.vertex.len() as u32);
        let all = kit::enumerate_mediators(&p.vertex, &p.left_coproj, &p.right_coproj, w, g1, g2);
        let h_map: BTreeMap<String, String> = h
            .mapping
            .iter()
            .map(|(k, v)| (k.clone(), v.as_single().unwrap_or("").to_owned()))
            .collect();
        ensure(all == [h_map], || {
            format!("trial {trial}: {} satisfying maps", all.len())
        })?;
    }
    Ok(format!("{CONE_TRIALS}/{CONE_TRIALS} cones; {maps} candidate maps enumerated, exactly one mediator each"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1A6_0006);
    for trial in 0..NAMING_TRIALS {
        let case = kit::random_span(&mut rng, 8, 12);
        let q = compute_pushout_with(&case.diagram, &case.span, "P", NamingPolicy::Qualified)
            .map_err(|e| e.to_string())?;
        let o = compute_pushout_with(&case.diagram, &case.span, "P", NamingPolicy::Opaque)
            .map_err(|e| e.to_string())?;
        kit::coprojection_bijection(
            (&q.vertex, &q.left_coproj, &q.right_coproj),
            (&o.vertex, &o.left_coproj, &o.right_coproj),
        )
        .map_err(|e| format!("trial {trial}: {e}"))?;
    }
    Ok(format!("{NAMING_TRIALS}/{NAMING_TRIALS} qualified/opaque pairs related by a kind-preserving bijection"))
}

fn round_trip(d: &Diagram) -> Result<(), String> {
    let once = dsl::serialize(d).map_err(|e| e.to_string())?;
    let back = dsl::parse(&once).map_err(|e| format!("{e}\n{once}"))?;
    ensure(&back == d, || format!("structure changed:\n{once}"))?;
    let twice = dsl::serialize(&back).map_err(|e| e.to_string())?;
    ensure(twice == once, || format!("bytes changed:\n{once}"))
}

fn criterion_7() -> Outcome {
    for (name, text) in corpus::FILES {
        round_trip(&dsl::parse(text).map_err(|e| e.to_string())?)
            .map_err(|e| format!("{name}: {e}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1A6_0007);
    for trial in 0..DIAGRAM_TRIALS {
        round_trip(&kit::random_diagram(&mut rng)).map_err(|e| format!("trial {trial}: {e}"))?;
    }
    Ok(format!(
        "{} corpus files + {DIAGRAM_TRIALS} random diagrams round-trip",
        corpus::FILES.len()
    ))
}

fn criterion_8() -> Outcome {
    let vi = bundled("virtual_inheritance.dml");
    let curly = emit_skeleton(&vi, Dialect::Curly)
        .map_err(|e| e.to_string())?
        .full_text();
    ensure(
        curly.contains("struct Z : public virtual Y1, public virtual Y2 {"),
        || curly.clone(),
    )?;

    let java = bundled("envelope_java.dml");
    let interface = emit_skeleton(&java, Dialect::Interface)
        .map_err(|e| e.to_string())?
        .full_text();
    ensure(
        interface.contains("public class EnvelopeInherit extends External implements Abstract {"),
        || interface.clone(),
    )?;

    let fig1 = bundled("linbox_copy.dml");
    let marked: Vec<_> = fig1
        .pushouts
        .values()
        .filter_map(|p| p.cone())
        .map(|c| recognize_pushout(&fig1, &c).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let dot = emit_dot(&fig1, &marked);
    let coprojections: BTreeSet<&str> = marked
        .iter()
        .flat_map(|p| [p.left_coproj.name.as_str(), p.right_coproj.name.as_str()])
        .collect();
    for m in fig1.morphisms.values() {
        let line = dot
            .lines()
            .find(|l| l.contains(&format!("label=\"{}: ", m.name)))
            .ok_or_else(|| format!("no edge for {}", m.name))?;
        let dashed = line.contains("style=dashed");
        ensure(dashed == coprojections.contains(m.name.as_str()), || {
            format!("edge {line}")
        })?;
    }

    let again = (
        emit_skeleton(&vi, Dialect::Curly)
            .map_err(|e| e.to_string())?
            .full_text(),
        emit_skeleton(&java, Dialect::Interface)
            .map_err(|e| e.to_string())?
            .full_text(),
        emit_dot(&fig1, &marked),
    );
    ensure(again == (curly, interface, dot), || {
        "output differs between runs".into()
    })?;
    Ok(format!(
        "virtual bases on Z; extends/implements; {} dashed coprojections; byte-identical reruns",
        coprojections.len()
    ))
}

fn graph_laws(trials: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1A6_0009);
    for trial in 0..trials {
        let t = kit::random_graph_triple(&mut rng);
        let k = &t.core;
        let [g1, g2, g3] = &t.graphs;
        let inc = GraphMorphism::inclusion(k);
        let e = |x: dml_core::graph::GraphError| format!("trial {trial}: {x}");
        let p12 = graph_pushout(k, &inc, g1, &inc, g2, "P12").map_err(e)?;
        let q = graph_pushout(
            k,
            &kit::compose_graph_morphisms(&inc, &p12.left),
            &p12.graph,
            &inc,
            g3,
            "Q",
        )
        .map_err(e)?;
        let p23 = graph_pushout(k, &inc, g2, &inc, g3, "P23").map_err(e)?;
        let r = graph_pushout(
            k,
            &inc,
            g1,
            &kit::compose_graph_morphisms(&inc, &p23.left),
            &p23.graph,
            "R",
        )
        .map_err(e)?;
        let phi = kit::induced_graph_map(&[
            (&kit::compose_graph_morphisms(&p12.left, &q.left), &r.left),
            (
                &kit::compose_graph_morphisms(&p12.right, &q.left),
                &kit::compose_graph_morphisms(&p23.left, &r.right),
            ),
            (
                &q.right,
                &kit::compose_graph_morphisms(&p23.right, &r.right),
            ),
        ])
        .ok_or_else(|| format!("trial {trial}: comparison map ill-defined"))?;
        ensure(kit::is_graph_isomorphism(&phi, &q.graph, &r.graph), || {
            format!("trial {trial}: not associative")
        })?;

        let unit = graph_pushout(k, &inc, k, &inc, g1, "U").map_err(e)?;
        ensure(
            kit::is_graph_isomorphism(&unit.right, g1, &unit.graph),
            || format!("trial {trial}: unit law fails"),
        )?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let f = PlainGraph::new("F").with_edge("f", "X", "Y");
    let a = PlainGraph::new("A").with_edge("a", "U", "X");
    let apex = PlainGraph::new("apex").with_node("X");
    let inc = GraphMorphism::inclusion(&apex);
    let glued = graph_pushout(&apex, &inc, &f, &inc, &a, "F+A").map_err(|e| e.to_string())?;
    let g = &glued.graph;
    let (a_img, f_img) = (&glued.right.edges["a"], &glued.left.edges["f"]);
    let (u, x1) = g.edge(a_img).ok_or("a lost")?;
    let (x2, y) = g.edge(f_img).ok_or("f lost")?;
    ensure(
        g.nodes.len() == 3 && g.edges.len() == 2 && x1 == x2 && u != y,
        || format!("glued graph {g:?}"),
    )?;

    let (arrow, _) = parameter_passing(&f, "f", &a, "a").map_err(|e| e.to_string())?;
    ensure(
        arrow.label == "f.a" && arrow.source == "U" && arrow.target == "Y",
        || {
            format!(
                "composite {}: {} -> {}",
                arrow.label, arrow.source, arrow.target
            )
        },
    )?;
    graph_laws(GRAPH_TRIALS)?;
    Ok(format!("U->X->Y glued, f.a: U -> Y; associativity and unit law on {GRAPH_TRIALS} random graph triples"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("virtual-inheritance pushout", criterion_1),
        ("linbox copy corpus", criterion_2),
        ("linbox inherit corpus", criterion_3),
        ("oracle equivalence", criterion_4),
        ("universal property", criterion_5),
        ("pushout uniqueness", criterion_6),
        ("dsl round-trip", criterion_7),
        ("codegen goldens", criterion_8),
        ("parameter passing", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                println!("FAIL {} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
