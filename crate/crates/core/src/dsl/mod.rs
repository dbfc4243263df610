//! Text format for diagrams (`.dml`).
//!
//! ```text
//! spec X class { method m0() }
//! spec Y1 class { method m0() method m1() }
//! morphism f1 : X -> Y1 kind=inheritance
//! equation f1;g1 = f2;g2
//! pushout Z from span(X, f1, f2) via g1, g2
//! ```

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::category::Violation;
use crate::pushout::PushoutError;

pub use parser::{parse, parse_unchecked};
pub use printer::{quote_name, serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub location: SourceSpan,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("diagram is ill-formed: {}", list(.0))]
    Validation(Vec<Violation>),
    #[error("cannot elaborate pushout `{name}`: {source}")]
    Elaboration {
        name: String,
        source: Box<PushoutError>,
    },
    #[error("cannot serialize an ill-formed diagram: {}", list(.0))]
    InvalidDiagram(Vec<Violation>),
}

fn list(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl DslError {
    pub fn code(&self) -> &'static str {
        match self {
            DslError::Parse(_) => "ParseError",
            DslError::Validation(_) => "ValidationError",
            DslError::Elaboration { source, .. } => source.code(),
            DslError::InvalidDiagram(_) => "InvalidDiagram",
        }
    }
}

pub(crate) const KEYWORDS: &[&str] = &[
    "spec", "generic", "morphism", "equation", "span", "pushout", "from", "via", "as", "kind",
    "method", "pure", "ctor", "dtor", "field", "value", "type", "indirect", "id",
];
