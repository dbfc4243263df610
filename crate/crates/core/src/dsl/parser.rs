use std::collections::BTreeSet;
use std::str::FromStr;

use super::lexer::{tokenize, Token, TokenKind};
use super::{DslError, ParseError, SourceSpan};
use crate::category::{
    validate_diagram, Diagram, Equation, Member, MemberExpr, MemberKind, Morphism, MorphismKind,
    Path, SpecKind, Specification,
};
use crate::pushout::{compute_pushout, PushoutDecl, Span};

const STATEMENTS: &[&str] = &["spec", "generic", "morphism", "equation", "span", "pushout"];
const SPEC_KINDS: &[&str] = &["class", "abstract", "builtin", "object", "typename", "unit"];
const MEMBER_FORMS: &[&str] = &["method", "ctor", "dtor", "field", "value", "type"];
const MORPHISM_KINDS: &[&str] = &[
    "identity",
    "inheritance",
    "implementation",
    "template-parameter",
    "instantiation",
    "value",
    "polymorphism",
    "coprojection",
    "mediating",
    "generic",
];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: SourceSpan,
}

fn quote_all(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| format!("`{w}`")).collect()
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, offset: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| &t.kind)
    }

    fn location(&self) -> SourceSpan {
        self.tokens.get(self.pos).map_or(self.end, |t| t.span)
    }

    fn error(&self, expected: Vec<String>) -> ParseError {
        let found = self
            .peek()
            .map_or("end of input".to_owned(), TokenKind::describe);
        ParseError {
            message: format!("unexpected {found}"),
            location: self.location(),
            expected,
        }
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Ident(w)) if w == word)
    }

    fn eat_word(&mut self, word: &str) -> bool {
        let hit = self.at_word(word);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_word(&mut self, word: &str) -> Result<(), ParseError> {
        if self.eat_word(word) {
            Ok(())
        } else {
            Err(self.error(vec![format!("`{word}`")]))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        let hit = self.peek() == Some(kind);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), ParseError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.error(vec![kind.describe()]))
        }
    }

    fn word(&mut self, allowed: &[&str]) -> Result<String, ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(w)) if allowed.contains(&w.as_str()) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error(quote_all(allowed))),
        }
    }

    /// A name with its location, for duplicate reports.
    fn name(&mut self) -> Result<(String, SourceSpan), ParseError> {
        let at = self.location();
        match self.peek() {
            Some(TokenKind::Ident(s) | TokenKind::Quoted(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, at))
            }
            _ => Err(self.error(vec!["a name".into()])),
        }
    }

    /// Sort names also admit numbers, for literal sorts.
    fn sort(&mut self) -> Result<String, ParseError> {
        if let Some(TokenKind::Number(n)) = self.peek() {
            let n = n.clone();
            self.pos += 1;
            return Ok(n);
        }
        Ok(self.name()?.0)
    }

    fn literal(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(s) | TokenKind::Quoted(s) | TokenKind::Number(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(vec!["a literal".into()])),
        }
    }

    fn signature(&mut self) -> Result<Vec<String>, ParseError> {
        self.expect(TokenKind::LParen)?;
        let mut sorts = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                sorts.push(self.sort()?);
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                if !self.eat(&TokenKind::Comma) {
                    return Err(self.error(vec!["`,`".into(), "`)`".into()]));
                }
            }
        }
        Ok(sorts)
    }

    fn sort_list(&mut self) -> Result<Vec<String>, ParseError> {
        let mut sorts = Vec::new();
        if self.eat(&TokenKind::Colon) {
            sorts.push(self.sort()?);
            while self.eat(&TokenKind::Comma) {
                sorts.push(self.sort()?);
            }
        }
        Ok(sorts)
    }

    fn member(&mut self, owner: &str) -> Result<(Member, SourceSpan), ParseError> {
        let (mut pure, mut generic, mut indirect) = (false, false, false);
        loop {
            if self.eat_word("pure") {
                pure = true;
            } else if self.eat_word("generic") {
                generic = true;
            } else if self.eat_word("indirect") {
                indirect = true;
            } else {
                break;
            }
        }
        let form_at = self.location();
        let form = self.word(MEMBER_FORMS)?;
        if pure && form != "method" {
            return Err(ParseError {
                message: "only methods can be pure".into(),
                location: form_at,
                expected: vec!["`method`".into()],
            });
        }
        let (mut member, at) = match form.as_str() {
            "method" => {
                let (name, at) = self.name()?;
                let kind = if pure {
                    MemberKind::PureVirtualMethod
                } else {
                    MemberKind::Method
                };
                (
                    Member::new(name, kind).with_signature(self.signature()?),
                    at,
                )
            }
            "ctor" | "dtor" => {
                let (name, at) = if matches!(self.peek(), Some(TokenKind::LParen)) {
                    let default = if form == "ctor" {
                        owner.to_owned()
                    } else {
                        format!("~{owner}")
                    };
                    (default, form_at)
                } else {
                    self.name()?
                };
                let kind = if form == "ctor" {
                    MemberKind::Constructor
                } else {
                    MemberKind::Destructor
                };
                (
                    Member::new(name, kind).with_signature(self.signature()?),
                    at,
                )
            }
            "field" | "type" => {
                let (name, at) = self.name()?;
                let kind = if form == "field" {
                    MemberKind::Field
                } else {
                    MemberKind::TypeMember
                };
                (
                    Member::new(name, kind).with_signature(self.sort_list()?),
                    at,
                )
            }
            _ => {
                let (name, at) = self.name()?;
                let mut m = Member::new(name, MemberKind::Value).with_signature(self.sort_list()?);
                if self.eat(&TokenKind::Equals) {
                    m.literal = Some(self.literal()?);
                }
                (m, at)
            }
        };
        member.is_generic = generic;
        member.indirect = indirect;
        Ok((member, at))
    }

    fn body(&mut self, spec: &mut Specification) -> Result<(), ParseError> {
        self.expect(TokenKind::LBrace)?;
        loop {
            while self.eat(&TokenKind::Semi) {}
            if self.eat(&TokenKind::RBrace) {
                return Ok(());
            }
            if self.peek().is_none() {
                return Err(self.error(vec!["`}`".into()]));
            }
            let (member, at) = self.member(&spec.name)?;
            if spec.has_member(&member.name) {
                return Err(duplicate("member", &member.name, at));
            }
            spec.insert_member(member);
        }
    }

    fn spec_kind(&mut self) -> Result<SpecKind, ParseError> {
        let kind = match self.peek() {
            Some(TokenKind::Ident(w)) => match w.as_str() {
                "class" => Some(SpecKind::Class),
                "abstract" | "abstract-class" => Some(SpecKind::AbstractClass),
                "builtin" | "builtin-type" => Some(SpecKind::BuiltinType),
                "object" => Some(SpecKind::Object),
                "typename" | "type-parameter" => Some(SpecKind::TypeParameter),
                "unit" => Some(SpecKind::Unit),
                _ => None,
            },
            _ => None,
        };
        match kind {
            Some(k) => {
                self.pos += 1;
                Ok(k)
            }
            None => {
                let mut e = self.error(quote_all(SPEC_KINDS));
                e.message.push_str(", expected a specification kind");
                Err(e)
            }
        }
    }

    fn member_expr(&mut self) -> Result<MemberExpr, ParseError> {
        let mut steps = vec![self.name()?.0];
        while self.eat(&TokenKind::Dot) {
            steps.push(self.name()?.0);
        }
        Ok(MemberExpr::new(steps).expect("at least one step"))
    }

    fn path(&mut self) -> Result<Path, ParseError> {
        if self.at_word("id") && self.peek_at(1) == Some(&TokenKind::LParen) {
            self.pos += 2;
            let (spec, _) = self.name()?;
            self.expect(TokenKind::RParen)?;
            return Ok(Path::Identity(spec));
        }
        let mut steps = vec![self.name()?.0];
        while self.eat(&TokenKind::Semi) {
            steps.push(self.name()?.0);
        }
        Ok(Path::of(steps))
    }

    fn span_args(&mut self) -> Result<Span, ParseError> {
        self.expect(TokenKind::LParen)?;
        let (apex, _) = self.name()?;
        self.expect(TokenKind::Comma)?;
        let left = self.path()?;
        self.expect(TokenKind::Comma)?;
        let right = self.path()?;
        self.expect(TokenKind::RParen)?;
        Ok(Span::new(apex, left, right))
    }
}

fn duplicate(what: &str, name: &str, at: SourceSpan) -> ParseError {
    ParseError {
        message: format!("duplicate {what} `{name}`"),
        location: at,
        expected: Vec::new(),
    }
}

fn end_of(text: &str) -> SourceSpan {
    let line = text.matches('\n').count() + 1;
    let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    SourceSpan {
        line,
        column,
        length: 0,
    }
}

/// Parses and elaborates without validating the result.
pub fn parse_unchecked(text: &str) -> Result<Diagram, DslError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: end_of(text),
    };
    let mut d = Diagram::new();
    let mut pending: Vec<String> = Vec::new();
    let mut spec_names = BTreeSet::new();
    while p.peek().is_some() {
        let statement = p.word(STATEMENTS)?;
        match statement.as_str() {
            "spec" | "generic" => {
                let (name, at) = p.name()?;
                let mut spec = if statement == "spec" {
                    Specification::new(&name, p.spec_kind()?)
                } else {
                    let mut params = Vec::new();
                    while !matches!(p.peek(), Some(TokenKind::LBrace) | None) {
                        params.push(p.name()?.0);
                    }
                    Specification::generic(&name, params)
                };
                if !spec_names.insert(name.clone()) {
                    return Err(duplicate("specification", &name, at).into());
                }
                p.body(&mut spec)?;
                d.add_spec(spec);
            }
            "morphism" => {
                let (name, at) = p.name()?;
                p.expect(TokenKind::Colon)?;
                let (source, _) = p.name()?;
                p.expect(TokenKind::Arrow)?;
                let (target, _) = p.name()?;
                p.expect_word("kind")?;
                p.expect(TokenKind::Equals)?;
                let kind_word = p.word(MORPHISM_KINDS)?;
                let kind = MorphismKind::from_str(&kind_word).expect("listed kind");
                let mut m = Morphism::new(&name, source, target, kind);
                if p.eat(&TokenKind::LBrace) {
                    loop {
                        while p.eat(&TokenKind::Semi) {}
                        if p.eat(&TokenKind::RBrace) {
                            break;
                        }
                        let (from, at) = p.name()?;
                        p.expect(TokenKind::Arrow)?;
                        let to = p.member_expr()?;
                        if m.mapping.insert(from.clone(), to).is_some() {
                            return Err(duplicate("mapping for", &from, at).into());
                        }
                    }
                }
                if d.morphisms.contains_key(&name) {
                    return Err(duplicate("morphism", &name, at).into());
                }
                d.add_morphism(m);
            }
            "equation" => {
                let lhs = p.path()?;
                p.expect(TokenKind::Equals)?;
                let rhs = p.path()?;
                d.equations.push(Equation::new(lhs, rhs));
            }
            "span" => {
                let (name, at) = p.name()?;
                let span = p.span_args()?;
                if d.spans.insert(name.clone(), span).is_some() {
                    return Err(duplicate("span", &name, at).into());
                }
            }
            _ => {
                let (vertex, at) = p.name()?;
                p.expect_word("from")?;
                p.expect_word("span")?;
                let span = p.span_args()?;
                let coprojections = if p.eat_word("via") {
                    let (l, _) = p.name()?;
                    p.expect(TokenKind::Comma)?;
                    let (r, _) = p.name()?;
                    Some((l, r))
                } else {
                    None
                };
                let (name, at) = if p.eat_word("as") {
                    p.name()?
                } else {
                    (vertex.clone(), at)
                };
                if d.pushouts.contains_key(&name) {
                    return Err(duplicate("pushout", &name, at).into());
                }
                if coprojections.is_none() {
                    pending.push(name.clone());
                }
                d.pushouts.insert(
                    name.clone(),
                    PushoutDecl {
                        name,
                        vertex,
                        span,
                        coprojections,
                    },
                );
            }
        }
    }

    fill_like_named(&mut d);
    for name in pending {
        let decl = d.pushouts[&name].clone();
        let result = compute_pushout(&d, &decl.span, &decl.vertex).map_err(|source| {
            DslError::Elaboration {
                name: name.clone(),
                source: Box::new(source),
            }
        })?;
        let shadowed = d.pushouts.get(&decl.vertex).cloned();
        let mut extended = result.extend(&d);
        extended.pushouts.remove(&decl.vertex);
        if let Some(shadowed) = shadowed {
            extended.pushouts.insert(decl.vertex.clone(), shadowed);
        }
        extended.pushouts.insert(
            name,
            PushoutDecl {
                coprojections: Some((
                    result.left_coproj.name.clone(),
                    result.right_coproj.name.clone(),
                )),
                ..decl
            },
        );
        d = extended;
    }
    Ok(d)
}

/// Members without an explicit image go to the like-named target member.
fn fill_like_named(d: &mut Diagram) {
    let Diagram {
        specs, morphisms, ..
    } = d;
    for m in morphisms.values_mut() {
        let (Some(source), Some(target)) = (specs.get(&m.source), specs.get(&m.target)) else {
            continue;
        };
        for x in source.member_names() {
            if !m.mapping.contains_key(x) && target.has_member(x) {
                m.mapping.insert(x.to_owned(), MemberExpr::single(x));
            }
        }
    }
}

/// Parses, elaborates the pushouts declared without coprojections, and
/// validates the resulting diagram.
pub fn parse(text: &str) -> Result<Diagram, DslError> {
    let d = parse_unchecked(text)?;
    let violations = validate_diagram(&d);
    if violations.is_empty() {
        Ok(d)
    } else {
        Err(DslError::Validation(violations))
    }
}
