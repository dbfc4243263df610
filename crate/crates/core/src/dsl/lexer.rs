use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    /// Bare identifier, template arguments normalized to ASCII brackets.
    Ident(String),
    Quoted(String),
    Number(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Equals,
    Arrow,
    Dot,
}

impl TokenKind {
    pub(crate) fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Quoted(s) => format!("\"{s}\""),
            TokenKind::Number(s) => format!("number {s}"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Equals => "`=`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Dot => "`.`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

struct Scanner {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl Scanner {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self, length: usize) -> SourceSpan {
        SourceSpan {
            line: self.line,
            column: self.column,
            length,
        }
    }

    fn error(&self, message: impl Into<String>, length: usize) -> ParseError {
        ParseError {
            message: message.into(),
            location: self.here(length),
            expected: Vec::new(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn template_args(&mut self, out: &mut String) -> Result<(), ParseError> {
        let mut depth = 0usize;
        loop {
            let start = self.here(1);
            match self.bump() {
                Some('<' | '⟨') => {
                    depth += 1;
                    out.push('<');
                }
                Some('>' | '⟩') => {
                    depth -= 1;
                    out.push('>');
                    if depth == 0 {
                        return Ok(());
                    }
                }
                Some(c) if ident_char(c) || c == ',' || c == ':' || c == '*' || c == '&' => {
                    out.push(c)
                }
                Some(c) => {
                    return Err(ParseError {
                        message: format!("unexpected `{c}` in template arguments"),
                        location: start,
                        expected: vec!["`>`".into()],
                    })
                }
                None => return Err(self.error("unterminated template arguments", 0)),
            }
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if ident_char(c)
                || (c == '-' && self.peek_at(1).is_some_and(|n| n.is_ascii_alphabetic()))
            {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if matches!(self.peek(), Some('<' | '⟨')) {
            self.template_args(&mut out)?;
        }
        Ok(out)
    }

    fn quoted(&mut self) -> Result<String, ParseError> {
        let open = self.here(1);
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some(c @ ('"' | '\\')) => out.push(c),
                    Some(c) => return Err(self.error(format!("unknown escape `\\{c}`"), 1)),
                    None => break,
                },
                Some(c) => out.push(c),
                None => break,
            }
        }
        Err(ParseError {
            message: "unterminated string".into(),
            location: open,
            expected: vec!["`\"`".into()],
        })
    }

    fn number(&mut self) -> String {
        let mut out = String::new();
        if self.peek() == Some('-') {
            out.push('-');
            self.bump();
        }
        while let Some(c) = self.peek() {
            if ident_char(c) || (c == '.' && self.peek_at(1).is_some_and(|n| n.is_ascii_digit())) {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        out
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut s = Scanner {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        s.skip_trivia();
        let Some(c) = s.peek() else { break };
        let (line, column, start) = (s.line, s.column, s.pos);
        let kind = match c {
            '{' | '}' | '(' | ')' | ',' | ';' | ':' | '=' | '.' => {
                s.bump();
                match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    ',' => TokenKind::Comma,
                    ';' => TokenKind::Semi,
                    ':' => TokenKind::Colon,
                    '=' => TokenKind::Equals,
                    _ => TokenKind::Dot,
                }
            }
            '-' if s.peek_at(1) == Some('>') => {
                s.bump();
                s.bump();
                TokenKind::Arrow
            }
            '→' => {
                s.bump();
                TokenKind::Arrow
            }
            '-' if s.peek_at(1).is_some_and(|n| n.is_ascii_digit()) => {
                TokenKind::Number(s.number())
            }
            c if c.is_ascii_digit() => TokenKind::Number(s.number()),
            c if ident_start(c) => TokenKind::Ident(s.ident()?),
            '"' => TokenKind::Quoted(s.quoted()?),
            other => return Err(s.error(format!("unexpected character `{other}`"), 1)),
        };
        tokens.push(Token {
            kind,
            span: SourceSpan {
                line,
                column,
                length: s.pos - start,
            },
        });
    }
    Ok(tokens)
}
