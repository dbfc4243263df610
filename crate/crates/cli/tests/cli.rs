use std::path::{Path, PathBuf};
use std::process::Command;

use dml_cli::{run, DEMOS};
use dml_core::corpus;
use tempfile::TempDir;

fn corpus_file(dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, corpus::get(name).unwrap()).unwrap();
    path
}

fn arg(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn validate_reports_counts() {
    let dir = TempDir::new().unwrap();
    let f = corpus_file(dir.path(), "linbox_copy.dml");
    let r = run(["dml", "validate", &arg(&f)]);
    assert_eq!(r.exit_code, 0, "{}", r.report);
    assert_eq!(r.get("validate.specs"), Some("11"));
    assert_eq!(r.get("validate.violations"), Some("0"));
}

#[test]
fn validate_flags_violations() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bad.dml");
    std::fs::write(&f, "spec A class { method m() }\nspec B class {}\nmorphism f : A -> B kind=generic { m -> nowhere }\n").unwrap();
    let r = run(["dml", "validate", &arg(&f)]);
    assert_eq!(r.exit_code, 1, "{}", r.report);
    assert!(
        r.get_all("violation")
            .any(|v| v.starts_with("UnknownMember")),
        "{:?}",
        r.machine_report
    );
}

#[test]
fn missing_file_is_exit_two() {
    let r = run([
        "dml",
        "pushout",
        "missing.dml",
        "--span",
        "s",
        "--vertex",
        "V",
    ]);
    assert_eq!(r.exit_code, 2);
    assert_eq!(r.get("error.code"), Some("FileNotFound"));
}

#[test]
fn parse_errors_are_exit_two_with_position() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("broken.dml");
    std::fs::write(&f, "spec A clazz {}\n").unwrap();
    let r = run(["dml", "validate", &arg(&f)]);
    assert_eq!(r.exit_code, 2);
    assert_eq!(r.get("error.code"), Some("ParseError"));
    assert!(r.report.contains("1:8"), "{}", r.report);
}

#[test]
fn pushout_of_the_diamond() {
    let dir = TempDir::new().unwrap();
    let f = corpus_file(dir.path(), "virtual_inheritance.dml");
    let r = run(["dml", "pushout", &arg(&f), "--span", "Z", "--vertex", "Z2"]);
    assert_eq!(r.exit_code, 0, "{}", r.report);
    assert_eq!(r.get("pushout.vertex"), Some("Z2"));
    assert_eq!(r.get("pushout.members"), Some("m0,m1,m2"));
    assert_eq!(r.get("provenance.m0"), Some("Y1::m0,Y2::m0"));

    let taken = run(["dml", "pushout", &arg(&f), "--span", "Z", "--vertex", "Z"]);
    assert_eq!(taken.exit_code, 1);
    assert_eq!(taken.get("error.code"), Some("NameTaken"));

    let opaque = run([
        "dml",
        "pushout",
        &arg(&f),
        "--span",
        "Z",
        "--vertex",
        "Z2",
        "--naming",
        "opaque",
    ]);
    assert_eq!(opaque.get("pushout.members"), Some("v0,v1,v2"));
}

#[test]
fn verify_reports_certificate_and_decomposition() {
    let dir = TempDir::new().unwrap();
    let f = corpus_file(dir.path(), "linbox_copy.dml");
    let r = run(["dml", "verify", &arg(&f), "--cone", "archetype_cone"]);
    assert_eq!(r.exit_code, 0, "{}", r.report);
    assert_eq!(r.get("certificate.kind"), Some("isomorphism"));
    assert_eq!(
        r.get("coprojection.arch_a2.kinds"),
        Some("inheritance,template-parameter,instantiation")
    );
    assert_eq!(r.get("coprojection.arch_a2.distinct"), Some("3"));

    let unknown = run(["dml", "verify", &arg(&f), "--cone", "nope"]);
    assert_eq!(unknown.exit_code, 1);
    assert_eq!(unknown.get("error.code"), Some("UnknownEntity"));
}

#[test]
fn verify_rejects_a_fattened_vertex() {
    let dir = TempDir::new().unwrap();
    let text = corpus::get("virtual_inheritance.dml").unwrap().replace(
        "spec Z class { method m0() method m1() method m2() }",
        "spec Z class { method m0() method m1() method m2() method extra() }",
    );
    let f = dir.path().join("fat.dml");
    std::fs::write(&f, text).unwrap();
    let r = run(["dml", "verify", &arg(&f), "--cone", "Z"]);
    assert_eq!(r.exit_code, 1, "{}", r.report);
    assert_eq!(r.get("certificate.kind"), Some("extra-member"));
    assert!(r.report.contains("extra"), "{}", r.report);
}

#[test]
fn classify_names_the_pattern() {
    let dir = TempDir::new().unwrap();
    let f = corpus_file(dir.path(), "polymorphism.dml");
    let r = run(["dml", "classify", &arg(&f), "--pushout", "B+g"]);
    assert_eq!(r.exit_code, 0, "{}", r.report);
    assert_eq!(r.get("pattern.tag"), Some("polymorphism"));
    assert_eq!(r.get("pattern.gluing-point"), Some("A"));
}

#[test]
fn skeleton_writes_one_file_per_spec() {
    let dir = TempDir::new().unwrap();
    let f = corpus_file(dir.path(), "virtual_inheritance.dml");
    let out = dir.path().join("out");
    let r = run([
        "dml",
        "skeleton",
        &arg(&f),
        "--dialect",
        "curly",
        "--out",
        &arg(&out),
    ]);
    assert_eq!(r.exit_code, 0, "{}", r.report);
    let files: Vec<&str> = r.get_all("skeleton.file").collect();
    assert_eq!(
        files,
        [
            "X.skeleton.curly",
            "Y1.skeleton.curly",
            "Y2.skeleton.curly",
            "Z.skeleton.curly",
            "main.skeleton.curly"
        ]
    );
    let z = std::fs::read_to_string(out.join("Z.skeleton.curly")).unwrap();
    assert!(z.contains("public virtual Y1, public virtual Y2"), "{z}");

    let r = run([
        "dml",
        "skeleton",
        &arg(&f),
        "--dialect",
        "interface",
        "--out",
        &arg(&out),
    ]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.get_all("skeleton.unsupported").count(), 1);
}

#[test]
fn dot_is_written() {
    let dir = TempDir::new().unwrap();
    let f = corpus_file(dir.path(), "linbox_copy.dml");
    let out = dir.path().join("fig.dot");
    let r = run(["dml", "dot", &arg(&f), "--out", &arg(&out)]);
    assert_eq!(r.exit_code, 0, "{}", r.report);
    assert_eq!(r.get("dot.marked"), Some("4"));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("style=dashed").count(), 8);
}

#[test]
fn paths_use_the_depth_flag() {
    let dir = TempDir::new().unwrap();
    let f = corpus_file(dir.path(), "virtual_inheritance.dml");
    let r = run([
        "dml",
        "paths",
        &arg(&f),
        "--lhs",
        "f1;g1",
        "--rhs",
        "f2;g2",
        "--depth",
        "3",
    ]);
    assert_eq!(r.exit_code, 0, "{}", r.report);
    assert_eq!(r.get("paths.verdict"), Some("equal"));
    assert_eq!(r.get("paths.depth"), Some("3"));
    let r = run(["dml", "paths", &arg(&f), "--lhs", "f1", "--rhs", "f2"]);
    assert_eq!(r.exit_code, 1);
    assert_eq!(r.get("error.code"), Some("NonParallelPaths"));
}

#[test]
fn machine_flag_switches_the_report() {
    let r = run(["dml", "--machine", "demo", "virtual-inheritance"]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.report, r.machine_text());
    assert!(r.report.contains("pattern.tag=virtual-inheritance\n"));
    assert!(r.report.ends_with("exit=0\n"));
}

#[test]
fn every_demo_succeeds_deterministically() {
    for (name, _) in DEMOS {
        let a = run(["dml", "demo", name]);
        assert_eq!(a.exit_code, 0, "{name}: {}", a.report);
        assert_eq!(a, run(["dml", "demo", name]), "{name}");
        assert!(
            a.get_all("certificate.kind").all(|k| k == "isomorphism"),
            "{name}"
        );
    }
}

#[test]
fn demo_writes_artifacts() {
    let dir = TempDir::new().unwrap();
    let r = run(["dml", "demo", "envelope-java", "--out", &arg(dir.path())]);
    assert_eq!(r.exit_code, 0, "{}", r.report);
    let java = std::fs::read_to_string(
        dir.path()
            .join("interface/EnvelopeInherit.skeleton.interface"),
    )
    .unwrap();
    assert!(
        java.contains("public class EnvelopeInherit extends External implements Abstract"),
        "{java}"
    );
    assert!(dir.path().join("envelope-java.dot").exists());
}

#[test]
fn binary_keeps_success_off_stderr() {
    let bin = env!("CARGO_BIN_EXE_dml");
    let ok = Command::new(bin)
        .args(["demo", "template"])
        .env("DML_COLOR", "0")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(ok.stderr.is_empty());
    assert!(String::from_utf8(ok.stdout)
        .unwrap()
        .contains("template-parameter-passing"));

    let bad = Command::new(bin)
        .args(["validate", "no/such/file.dml"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
    assert!(String::from_utf8(bad.stderr)
        .unwrap()
        .contains("FileNotFound"));

    let usage = Command::new(bin).args(["pushout"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8(usage.stderr).unwrap().contains("Usage"));
}
