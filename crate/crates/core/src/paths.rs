//! Bounded equality of parallel paths.
//!
//! Paths are compared first by their composed member mappings, which can
//! only refute equality. Equality itself is established by rewriting with the
//! declared equations, up to a caller-supplied number of rewrite steps.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::category::{CategoryError, Diagram, MemberExpr, MorphismKind, Path};

pub const DEFAULT_DEPTH: usize = 8;

/// Words visited per query before giving up.
const STATE_LIMIT: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathVerdict {
    /// Connected by `steps` equation rewrites.
    Equal {
        steps: usize,
    },
    /// The two composites send `member` to different places.
    Unequal {
        member: String,
        lhs: Option<MemberExpr>,
        rhs: Option<MemberExpr>,
    },
    Unknown,
}

impl PathVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            PathVerdict::Equal { .. } => "equal",
            PathVerdict::Unequal { .. } => "unequal",
            PathVerdict::Unknown => "unknown",
        }
    }
}

impl fmt::Display for PathVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show =
            |e: &Option<MemberExpr>| e.as_ref().map_or("nothing".to_owned(), |e| e.to_string());
        match self {
            PathVerdict::Equal { steps } => write!(f, "equal ({steps} rewrites)"),
            PathVerdict::Unequal { member, lhs, rhs } => {
                write!(
                    f,
                    "unequal: `{member}` goes to {} vs {}",
                    show(lhs),
                    show(rhs)
                )
            }
            PathVerdict::Unknown => f.write_str("unknown"),
        }
    }
}

type Word = Vec<String>;

struct Rewriter<'a> {
    d: &'a Diagram,
    rules: Vec<(Word, Word)>,
}

impl<'a> Rewriter<'a> {
    fn new(d: &'a Diagram) -> Result<Self, CategoryError> {
        let mut rules = Vec::new();
        for eq in &d.equations {
            let l = normalize(d, &eq.lhs)?;
            let r = normalize(d, &eq.rhs)?;
            if l != r {
                rules.push((l.clone(), r.clone()));
                rules.push((r, l));
            }
        }
        Ok(Rewriter { d, rules })
    }

    /// Object sitting before position `i` of a non-empty word.
    fn object_at(&self, word: &Word, i: usize) -> Option<&'a str> {
        if i < word.len() {
            self.d.morphisms.get(&word[i]).map(|m| m.source.as_str())
        } else {
            self.d
                .morphisms
                .get(&word[i - 1])
                .map(|m| m.target.as_str())
        }
    }

    fn word_source(&self, word: &Word) -> Option<&'a str> {
        word.first()
            .and_then(|s| self.d.morphisms.get(s))
            .map(|m| m.source.as_str())
    }

    fn neighbours(&self, word: &Word, object: &str) -> Vec<Word> {
        let mut out = Vec::new();
        for (from, to) in &self.rules {
            if from.is_empty() {
                // an identity can be expanded wherever the object matches
                let Some(at) = self.word_source(to) else {
                    continue;
                };
                for i in 0..=word.len() {
                    let here = if word.is_empty() {
                        Some(object)
                    } else {
                        self.object_at(word, i)
                    };
                    if here == Some(at) {
                        let mut w = word[..i].to_vec();
                        w.extend(to.iter().cloned());
                        w.extend(word[i..].iter().cloned());
                        out.push(w);
                    }
                }
                continue;
            }
            if from.len() > word.len() {
                continue;
            }
            for i in 0..=word.len() - from.len() {
                if word[i..i + from.len()] == from[..] {
                    let mut w = word[..i].to_vec();
                    w.extend(to.iter().cloned());
                    w.extend(word[i + from.len()..].iter().cloned());
                    out.push(w);
                }
            }
        }
        out
    }
}

/// Steps of a path with identities removed.
fn normalize(d: &Diagram, p: &Path) -> Result<Word, CategoryError> {
    let mut out = Vec::new();
    for step in p.steps() {
        if d.morphism(step)?.kind != MorphismKind::Identity {
            out.push(step.clone());
        }
    }
    Ok(out)
}

/// Three-valued equality of two parallel paths within `depth` rewrites.
pub fn paths_equal(
    d: &Diagram,
    p: &Path,
    q: &Path,
    depth: usize,
) -> Result<PathVerdict, CategoryError> {
    let (ps, pt) = d.path_endpoints(p)?;
    let (qs, qt) = d.path_endpoints(q)?;
    if ps != qs || pt != qt {
        return Err(CategoryError::NonParallelPaths {
            lhs: p.to_string(),
            rhs: q.to_string(),
        });
    }

    let fp = d.path_morphism(p)?;
    let fq = d.path_morphism(q)?;
    let source = d.spec(&ps)?;
    for x in source.member_names() {
        if fp.image(x) != fq.image(x) {
            return Ok(PathVerdict::Unequal {
                member: x.to_owned(),
                lhs: fp.image(x).cloned(),
                rhs: fq.image(x).cloned(),
            });
        }
    }

    let start = normalize(d, p)?;
    let goal = normalize(d, q)?;
    if start == goal {
        return Ok(PathVerdict::Equal { steps: 0 });
    }
    let rewriter = Rewriter::new(d)?;
    let mut seen: BTreeSet<Word> = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((word, steps)) = queue.pop_front() {
        if steps == depth {
            continue;
        }
        for next in rewriter.neighbours(&word, &ps) {
            if next == goal {
                return Ok(PathVerdict::Equal { steps: steps + 1 });
            }
            if seen.len() >= STATE_LIMIT {
                return Ok(PathVerdict::Unknown);
            }
            if seen.insert(next.clone()) {
                queue.push_back((next, steps + 1));
            }
        }
    }
    Ok(PathVerdict::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{Equation, Member, Morphism, SpecKind, Specification};

    fn class(name: &str, members: &[&str]) -> Specification {
        Specification::new(name, SpecKind::Class).with_members(
            members
                .iter()
                .map(|m| Member::method(*m, Vec::<String>::new())),
        )
    }

    fn diamond(z: Specification, g2_m0: &str) -> Diagram {
        let x = class("X", &["m0"]);
        let y1 = class("Y1", &["m0", "m1"]);
        let y2 = class("Y2", &["m0", "m2"]);
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
            .with_morphism(
                Morphism::new("g2", "Y2", &z.name, MorphismKind::Generic)
                    .map_single("m0", g2_m0)
                    .map_single("m2", "m2"),
            )
            .with_spec(x)
            .with_spec(y1)
            .with_spec(y2)
            .with_spec(z)
    }

    #[test]
    fn declared_square_is_equal() {
        let d = diamond(class("Z", &["m0", "m1", "m2"]), "m0").with_equation(Equation::new(
            Path::of(["f1", "g1"]),
            Path::of(["f2", "g2"]),
        ));
        let v = paths_equal(
            &d,
            &Path::of(["f1", "g1"]),
            &Path::of(["f2", "g2"]),
            DEFAULT_DEPTH,
        )
        .unwrap();
        assert_eq!(v, PathVerdict::Equal { steps: 1 });
    }

    #[test]
    fn two_copies_of_m0_are_unequal() {
        let d = diamond(class("Z", &["m0", "m0'", "m1", "m2"]), "m0'");
        let v = paths_equal(
            &d,
            &Path::of(["f1", "g1"]),
            &Path::of(["f2", "g2"]),
            DEFAULT_DEPTH,
        )
        .unwrap();
        assert_eq!(v.as_str(), "unequal");
        let PathVerdict::Unequal { member, .. } = v else {
            unreachable!()
        };
        assert_eq!(member, "m0");
    }

    #[test]
    fn agreeing_mappings_without_equation_are_unknown() {
        let d = diamond(class("Z", &["m0", "m1", "m2"]), "m0");
        let v = paths_equal(
            &d,
            &Path::of(["f1", "g1"]),
            &Path::of(["f2", "g2"]),
            DEFAULT_DEPTH,
        )
        .unwrap();
        assert_eq!(v, PathVerdict::Unknown);
    }

    #[test]
    fn reflexive_at_any_depth() {
        let d = diamond(class("Z", &["m0", "m1", "m2"]), "m0");
        let p = Path::of(["f1", "g1"]);
        for depth in [0, 1, 8] {
            assert_eq!(
                paths_equal(&d, &p, &p, depth).unwrap(),
                PathVerdict::Equal { steps: 0 }
            );
        }
    }

    #[test]
    fn identities_are_dropped() {
        let x = class("X", &["a"]);
        let y = class("Y", &["a"]);
        let d = Diagram::new()
            .with_morphism(crate::category::identity_morphism(&x))
            .with_morphism(Morphism::like_named("f", &x, &y, MorphismKind::Inheritance))
            .with_spec(x)
            .with_spec(y);
        let v = paths_equal(&d, &Path::of(["id_X", "f"]), &Path::single("f"), 0).unwrap();
        assert_eq!(v, PathVerdict::Equal { steps: 0 });
    }

    #[test]
    fn chained_equations_need_depth() {
        // a;b = c and c = e;h, so a;b = e;h needs two rewrites
        let spec = |n: &str| class(n, &["m"]);
        let (p, q, r) = (spec("P"), spec("Q"), spec("R"));
        let mk = |n: &str, s: &Specification, t: &Specification| {
            Morphism::like_named(n, s, t, MorphismKind::Generic)
        };
        let d = Diagram::new()
            .with_morphism(mk("a", &p, &q))
            .with_morphism(mk("b", &q, &r))
            .with_morphism(mk("c", &p, &r))
            .with_morphism(mk("e", &p, &q))
            .with_morphism(mk("h", &q, &r))
            .with_spec(p)
            .with_spec(q)
            .with_spec(r)
            .with_equation(Equation::new(Path::of(["a", "b"]), Path::single("c")))
            .with_equation(Equation::new(Path::single("c"), Path::of(["e", "h"])));
        let (l, r) = (Path::of(["a", "b"]), Path::of(["e", "h"]));
        assert_eq!(paths_equal(&d, &l, &r, 1).unwrap(), PathVerdict::Unknown);
        assert_eq!(
            paths_equal(&d, &l, &r, 2).unwrap(),
            PathVerdict::Equal { steps: 2 }
        );
    }

    #[test]
    fn non_parallel_is_an_error() {
        let d = diamond(class("Z", &["m0", "m1", "m2"]), "m0");
        let err = paths_equal(&d, &Path::single("f1"), &Path::single("f2"), 8).unwrap_err();
        assert_eq!(err.code(), "NonParallelPaths");
    }
}
