use std::collections::BTreeSet;
use std::fs;
use std::io::ErrorKind;
use std::path::Path as FsPath;

use dml_core::codegen::{emit_dot, emit_skeleton, sanitize, Dialect};
use dml_core::constructs::classify_pushout;
use dml_core::pushout::{coprojection_decomposition, Leg};
use dml_core::{
    compute_pushout_with, dsl, is_pushout, paths_equal, recognize_pushout, validate_diagram,
    verify_cone_commutes, Cone, Diagram, NamingPolicy, Path, PushoutResult,
};

use crate::{Context, Failure, Report};

pub(crate) fn read(path: &FsPath) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input {
        code: if e.kind() == ErrorKind::NotFound {
            "FileNotFound"
        } else {
            "IoError"
        },
        message: format!("{}: {e}", path.display()),
    })
}

pub(crate) fn load(path: &FsPath) -> Result<Diagram, Failure> {
    Ok(dsl::parse(&read(path)?)?)
}

fn unknown(what: &str, name: &str) -> Failure {
    Failure::domain("UnknownEntity", format!("no {what} named `{name}`"))
}

pub(crate) fn declared_cone(d: &Diagram, name: &str) -> Result<Cone, Failure> {
    let decl = d
        .pushouts
        .get(name)
        .ok_or_else(|| unknown("pushout", name))?;
    decl.cone().ok_or_else(|| {
        Failure::domain(
            "MalformedCone",
            format!("pushout `{name}` has no coprojections"),
        )
    })
}

fn write_file(path: &FsPath, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input {
        code: "IoError",
        message: format!("{}: {e}", path.display()),
    })
}

pub(crate) fn validate(r: &mut Report, file: &FsPath) -> Result<(), Failure> {
    let d = dsl::parse_unchecked(&read(file)?)?;
    let violations = validate_diagram(&d);
    for v in &violations {
        r.bad(&v.to_string());
        r.kv("violation", format!("{}:{}", v.rule, v.entity));
    }
    r.kv("validate.specs", d.specs.len());
    r.kv("validate.morphisms", d.morphisms.len());
    r.kv("validate.pushouts", d.pushouts.len());
    r.kv("validate.violations", violations.len());
    if violations.is_empty() {
        r.good(&format!(
            "{}: {} specifications, {} morphisms, {} pushouts",
            file.display(),
            d.specs.len(),
            d.morphisms.len(),
            d.pushouts.len()
        ));
    }
    Ok(())
}

pub(crate) fn pushout(
    r: &mut Report,
    file: &FsPath,
    span: &str,
    vertex: &str,
    policy: NamingPolicy,
) -> Result<(), Failure> {
    let d = load(file)?;
    let s = d.find_span(span).ok_or_else(|| unknown("span", span))?;
    let p =
        compute_pushout_with(&d, s, vertex, policy).map_err(|e| Failure::domain(e.code(), e))?;
    describe_pushout(r, &p);
    Ok(())
}

pub(crate) fn describe_pushout(r: &mut Report, p: &PushoutResult) {
    let names: Vec<&str> = p.vertex.member_names().collect();
    r.line(format!(
        "pushout of {} is {} ({})",
        p.cone.base,
        p.vertex.name,
        p.vertex.kind.as_str()
    ));
    r.kv("pushout.vertex", &p.vertex.name);
    r.kv("pushout.kind", p.vertex.kind.as_str());
    r.kv("pushout.members", names.join(","));
    for (member, origins) in &p.provenance {
        let from: Vec<String> = origins
            .iter()
            .map(|o| format!("{}::{}", o.spec, o.member))
            .collect();
        r.line(format!("  {member} <- {}", from.join(", ")));
        r.kv(format!("provenance.{member}"), from.join(","));
    }
    r.line(format!("  commuting square: {}", p.added_equation));
    r.kv("pushout.equation", &p.added_equation);
}

pub(crate) fn verify_cone(
    r: &mut Report,
    d: &Diagram,
    name: &str,
    cone: &Cone,
) -> Result<bool, Failure> {
    let commutes = verify_cone_commutes(d, cone).map_err(|e| Failure::domain(e.code(), e))?;
    if !commutes {
        r.bad(&format!("{name}: the square does not commute"));
        r.kv("certificate.kind", "non-commuting");
        return Ok(false);
    }
    let verdict = is_pushout(d, cone).map_err(|e| Failure::domain(e.code(), e))?;
    r.kv("verify.cone", name);
    r.kv("verify.is_pushout", verdict.is_pushout);
    r.kv("certificate.kind", verdict.certificate.kind());
    if verdict.is_pushout {
        r.good(&format!(
            "{name}: {} is a pushout of {}",
            cone.vertex, cone.base
        ));
    } else {
        r.bad(&format!(
            "{name}: {} is not a pushout: {}",
            cone.vertex, verdict.certificate
        ));
    }
    r.line(format!("  certificate: {}", verdict.certificate));
    Ok(verdict.is_pushout)
}

pub(crate) fn verify(r: &mut Report, file: &FsPath, name: &str) -> Result<(), Failure> {
    let d = load(file)?;
    let cone = declared_cone(&d, name)?;
    if !verify_cone(r, &d, name, &cone)? {
        return Ok(());
    }
    for side in [Leg::Left, Leg::Right] {
        let coproj = cone.coproj(side);
        let steps = coprojection_decomposition(&d, &cone, side)
            .map_err(|e| Failure::domain(e.code(), e))?;
        let kinds: Vec<&str> = steps.iter().map(|(_, k)| k.as_str()).collect();
        let distinct: BTreeSet<&str> = kinds.iter().copied().collect();
        let m = &d.morphisms[coproj];
        r.line(format!(
            "  {coproj}: {} -> {} mirrors {} morphism(s) of {} distinct kind(s): {}",
            m.source,
            m.target,
            steps.len(),
            distinct.len(),
            kinds.join(", ")
        ));
        r.kv(format!("coprojection.{coproj}.kinds"), kinds.join(","));
        r.kv(format!("coprojection.{coproj}.distinct"), distinct.len());
    }
    Ok(())
}

pub(crate) fn classify(r: &mut Report, file: &FsPath, name: &str) -> Result<(), Failure> {
    let d = load(file)?;
    let cone = declared_cone(&d, name)?;
    let p = recognize_pushout(&d, &cone).map_err(|e| Failure::domain(e.code(), e))?;
    let pattern = classify_pushout(&d, &p).map_err(|e| Failure::domain(e.code(), e))?;
    r.line(format!("{name}: {}", pattern.tag));
    r.kv("pattern.tag", pattern.tag);
    for (k, v) in &pattern.bindings {
        r.line(format!("  {k} = {v}"));
        r.kv(format!("pattern.{k}"), v);
    }
    Ok(())
}

/// Declared pushouts that are recognized as such, for dashed rendering.
pub(crate) fn marked_pushouts(d: &Diagram) -> Vec<PushoutResult> {
    d.pushouts
        .values()
        .filter_map(|decl| decl.cone())
        .filter_map(|c| recognize_pushout(d, &c).ok())
        .collect()
}

fn create_dir(out: &FsPath) -> Result<(), Failure> {
    fs::create_dir_all(out).map_err(|e| Failure::Input {
        code: "IoError",
        message: format!("{}: {e}", out.display()),
    })
}

/// Writes the skeleton of `d` into `out`; returns the written file names.
pub(crate) fn write_skeleton(
    r: &mut Report,
    d: &Diagram,
    dialect: Dialect,
    out: &FsPath,
) -> Result<Vec<String>, Failure> {
    let sk = emit_skeleton(d, dialect).map_err(|e| Failure::domain(e.code(), e))?;
    create_dir(out)?;
    let mut written = Vec::new();
    let mut used = BTreeSet::new();
    let units = sk
        .units
        .iter()
        .map(|u| (sanitize(&u.spec_name), u.text.as_str()));
    let main = sk.main_block();
    for (stem, text) in units.chain([("main".to_owned(), main.as_str())]) {
        let mut file = format!("{stem}.skeleton.{dialect}");
        let mut n = 2;
        while !used.insert(file.clone()) {
            file = format!("{stem}_{n}.skeleton.{dialect}");
            n += 1;
        }
        write_file(&out.join(&file), text)?;
        r.kv("skeleton.file", &file);
        written.push(file);
    }
    for u in &sk.unsupported {
        r.line(format!("  unsupported: {u}"));
        r.kv("skeleton.unsupported", u);
    }
    r.good(&format!(
        "{} {dialect} skeleton file(s) in {}, {} unsupported construct(s)",
        written.len(),
        out.display(),
        sk.unsupported.len()
    ));
    Ok(written)
}

pub(crate) fn skeleton(
    r: &mut Report,
    file: &FsPath,
    dialect: Dialect,
    out: &FsPath,
) -> Result<(), Failure> {
    let d = load(file)?;
    write_skeleton(r, &d, dialect, out).map(|_| ())
}

pub(crate) fn dot(r: &mut Report, file: &FsPath, out: &FsPath) -> Result<(), Failure> {
    let d = load(file)?;
    let marked = marked_pushouts(&d);
    write_file(out, &emit_dot(&d, &marked))?;
    r.kv("dot.out", out.display());
    r.kv("dot.marked", marked.len());
    r.good(&format!(
        "wrote {} ({} marked pushouts)",
        out.display(),
        marked.len()
    ));
    Ok(())
}

/// `f;g;h` or `id(X)`.
pub(crate) fn parse_path(text: &str) -> Result<Path, Failure> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix("id(").and_then(|t| t.strip_suffix(')')) {
        return Ok(Path::Identity(inner.trim().to_owned()));
    }
    let steps: Vec<&str> = text.split(';').map(str::trim).collect();
    if steps.iter().any(|s| s.is_empty()) {
        return Err(Failure::Input {
            code: "ParseError",
            message: format!("malformed path `{text}`"),
        });
    }
    Ok(Path::of(steps))
}

pub(crate) fn paths(
    r: &mut Report,
    ctx: &Context,
    file: &FsPath,
    lhs: &str,
    rhs: &str,
) -> Result<(), Failure> {
    let d = load(file)?;
    let (p, q) = (parse_path(lhs)?, parse_path(rhs)?);
    let verdict = paths_equal(&d, &p, &q, ctx.depth).map_err(|e| Failure::domain(e.code(), e))?;
    r.kv("paths.verdict", verdict.as_str());
    r.kv("paths.depth", ctx.depth);
    let text = format!("{p} vs {q}: {verdict}");
    if matches!(verdict, dml_core::PathVerdict::Equal { .. }) {
        r.good(&text);
    } else {
        r.bad(&text);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_syntax() {
        assert_eq!(parse_path("id(X)").unwrap(), Path::Identity("X".into()));
        assert_eq!(parse_path("f1; g1").unwrap(), Path::of(["f1", "g1"]));
        assert!(parse_path("f1;;g1").is_err());
    }
}
