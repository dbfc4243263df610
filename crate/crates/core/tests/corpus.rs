use std::collections::BTreeSet;

use dml_core::constructs::{
    classify_pushout, object_construction, structural_diff, DiffItem, PatternTag,
};
use dml_core::pushout::coprojection_decomposition;
use dml_core::{corpus, dsl, is_pushout, recognize_pushout, Diagram, Leg, MorphismKind, SpecKind};

fn load(text: &str) -> Diagram {
    dsl::parse(text).unwrap_or_else(|e| panic!("{e}"))
}

#[test]
fn every_file_parses_and_validates() {
    for (name, text) in corpus::FILES {
        let d = dsl::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!d.is_empty(), "{name}");
    }
}

#[test]
fn every_declared_pushout_is_a_pushout() {
    for (name, text) in corpus::FILES {
        let d = load(text);
        for decl in d.pushouts.values() {
            let cone = decl.cone().unwrap();
            let verdict =
                is_pushout(&d, &cone).unwrap_or_else(|e| panic!("{name}/{}: {e}", decl.name));
            assert!(
                verdict.is_pushout,
                "{name}/{}: {}",
                decl.name, verdict.certificate
            );
        }
    }
}

#[test]
fn virtual_inheritance_shape() {
    let d = load(corpus::VIRTUAL_INHERITANCE);
    assert_eq!(
        (d.specs.len(), d.morphisms.len(), d.equations.len()),
        (4, 4, 1)
    );
}

fn classify(d: &Diagram, name: &str) -> PatternTag {
    let cone = d.pushouts[name].cone().unwrap();
    let p = recognize_pushout(d, &cone).unwrap();
    classify_pushout(d, &p).unwrap().tag
}

#[test]
fn corpus_pushouts_are_classified() {
    let d = load(corpus::LINBOX_COPY);
    assert_eq!(
        classify(&d, "Envelope<Zp>"),
        PatternTag::TemplateParameterPassing
    );
    for name in ["F2", "E2", "archetype_cone"] {
        assert_eq!(
            classify(&d, name),
            PatternTag::ObjectInstantiation,
            "{name}"
        );
    }
    assert_eq!(
        classify(&load(corpus::VIRTUAL_INHERITANCE), "Z"),
        PatternTag::VirtualInheritance
    );
    assert_eq!(
        classify(&load(corpus::POLYMORPHISM), "B+g"),
        PatternTag::Polymorphism
    );
    let t = load(corpus::TEMPLATE);
    assert_eq!(classify(&t, "T<A>"), PatternTag::TemplateParameterPassing);
    assert_eq!(classify(&t, "ta"), PatternTag::ObjectInstantiation);
}

#[test]
fn archetype_coprojection_has_three_natures() {
    let d = load(corpus::LINBOX_COPY);
    let cone = d.pushouts["archetype_cone"].cone().unwrap();
    assert_eq!(cone.left_coproj, "arch_a2");
    let steps = coprojection_decomposition(&d, &cone, Leg::Left).unwrap();
    let kinds: Vec<MorphismKind> = steps.iter().map(|(_, k)| *k).collect();
    assert_eq!(
        kinds,
        [
            MorphismKind::Inheritance,
            MorphismKind::TemplateParameter,
            MorphismKind::Instantiation
        ]
    );
    assert_eq!(kinds.iter().collect::<BTreeSet<_>>().len(), 3);
}

#[test]
fn linbox_node_counts() {
    assert_eq!(load(corpus::LINBOX_COPY).specs.len(), 11);
    assert_eq!(load(corpus::LINBOX_INHERIT).specs.len(), 10);
}

#[test]
fn object_constructions() {
    let d = load(corpus::LINBOX_COPY);
    let show = |d: &Diagram, o: &str| object_construction(d, o).unwrap().to_string();
    assert_eq!(show(&d, "2"), "2;");
    assert_eq!(show(&d, "F2"), "Zp F2(2);");
    assert_eq!(show(&d, "E2"), "Envelope<Zp> E2(&F2);");
    assert_eq!(show(&d, "A2"), "Archetype A2(&E2);");
    let h = load(corpus::LINBOX_INHERIT);
    assert_eq!(show(&h, "E2"), "Envelope<Zp> E2(2);");
    let t = load(corpus::TEMPLATE);
    assert_eq!(show(&t, "ta"), "T<A> ta;");
    assert_eq!(d.specs["A2"].kind, SpecKind::Object);
}

#[test]
fn inherit_variant_differs_from_copy_variant() {
    let diff = structural_diff(&load(corpus::LINBOX_COPY), &load(corpus::LINBOX_INHERIT));
    let got: BTreeSet<DiffItem> = diff.into_iter().collect();
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
    assert_eq!(got, expected);
}

#[test]
fn canonical_form_is_a_fixpoint_on_the_corpus() {
    for (name, text) in corpus::FILES {
        let d = load(text);
        let once = dsl::serialize(&d).unwrap();
        let back = dsl::parse(&once).unwrap_or_else(|e| panic!("{name}: {e}\n{once}"));
        assert_eq!(back, d, "{name}");
        assert_eq!(dsl::serialize(&back).unwrap(), once, "{name}");
    }
}
