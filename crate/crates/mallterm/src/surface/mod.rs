//! Concrete syntax: formulas, sequents, the two term syntaxes, signature
//! files and paired `sequent --- term` files.
//!
//! Term-calculus syntax:
//!
//! ```text
//! a == b                      identity
//! a{ t => e | u => e' }       case (nullary: a{})
//! a[t]. e                     select
//! a<(p, q) => e>              split (nullary: a<() => e>)
//! a< p | {x, y} => e ; q | {} => e' >   fork (nullary: a<>)
//! cut g (e, e')               cut, optionally `cut g : X (e, e')`
//! f(a, b; c)                  axiom
//! ```
//!
//! Programming syntax uses `input`, `output`, `split`, `fork`, `on .. plug
//! .. to`, `stop`, `close` and `end`. A `|` always continues the innermost
//! open `input`/`fork`; wrap a branch in parentheses to close it early.

mod files;
mod lexer;
mod parser;
mod printer;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::core::{CoreError, Path};

pub use files::{parse_paired, parse_signature, sniff_syntax, Paired};
pub use parser::{
    parse_formula, parse_formula_at, parse_sequent, parse_term, parse_term_spanned,
};
pub use printer::{print_sequent, print_term};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize)]
pub enum SyntaxKind {
    TermCalc,
    ProgLang,
}

impl SyntaxKind {
    pub fn both() -> [SyntaxKind; 2] {
        [SyntaxKind::TermCalc, SyntaxKind::ProgLang]
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize, start_line: usize, start_col: usize, end_line: usize, end_col: usize) -> Self {
        SourceSpan { start, end, start_line, start_col, end_line, end_col }
    }

    /// Smallest span covering both.
    pub fn join(self, other: SourceSpan) -> SourceSpan {
        let (a, b) = if self.start <= other.start { (self, other) } else { (other, self) };
        let last = if a.end >= b.end { a } else { b };
        SourceSpan {
            start: a.start,
            end: last.end,
            start_line: a.start_line,
            start_col: a.start_col,
            end_line: last.end_line,
            end_col: last.end_col,
        }
    }

    /// Moves the span down by `lines` lines and `bytes` bytes, for text cut
    /// out of a larger file at a line boundary.
    pub fn shifted(self, bytes: usize, lines: usize) -> SourceSpan {
        SourceSpan {
            start: self.start + bytes,
            end: self.end + bytes,
            start_line: self.start_line + lines,
            end_line: self.end_line + lines,
            ..self
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}

/// Where each term node came from, keyed by its path.
pub type SpanMap = BTreeMap<Path, SourceSpan>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    /// Set when the failure is a violated formula or sequent invariant.
    pub core: Option<CoreError>,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into(), core: None }
    }

    pub fn core(span: SourceSpan, e: CoreError) -> Self {
        ParseError { span, message: e.to_string(), core: Some(e) }
    }

    pub fn shifted(mut self, bytes: usize, lines: usize) -> Self {
        self.span = self.span.shifted(bytes, lines);
        self
    }
}
