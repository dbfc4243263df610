//! Emitted skeletons and DOT for the bundled corpus, compared byte for byte
//! with `tests/golden/`. Run with `UPDATE_GOLDEN=1` to rewrite them.

use std::path::PathBuf;

use dml_core::codegen::{emit_dot, emit_skeleton, Dialect};
use dml_core::{corpus, dsl, recognize_pushout, Diagram, PushoutResult};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn marked(d: &Diagram) -> Vec<PushoutResult> {
    d.pushouts
        .values()
        .filter_map(|p| p.cone())
        .map(|c| recognize_pushout(d, &c).unwrap())
        .collect()
}

fn renderings() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (file, text) in corpus::FILES {
        let d = dsl::parse(text).unwrap();
        let stem = file.trim_end_matches(".dml");
        for dialect in [Dialect::Curly, Dialect::Interface] {
            let sk = emit_skeleton(&d, dialect).unwrap();
            out.push((format!("{stem}.{dialect}"), sk.full_text()));
        }
        out.push((format!("{stem}.dot"), emit_dot(&d, &marked(&d))));
    }
    out
}

#[test]
fn outputs_match_goldens() {
    let dir = golden_dir();
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    if update {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for (name, text) in renderings() {
        let path = dir.join(&name);
        if update {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let expected =
            std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(text, expected, "{name} differs from its golden file");
    }
}

#[test]
fn outputs_are_deterministic() {
    assert_eq!(renderings(), renderings());
}
