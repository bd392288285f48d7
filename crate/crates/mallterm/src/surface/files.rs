use std::collections::BTreeSet;

use super::lexer::Tok;
use super::parser::{Parser, Raw};
use super::{ParseError, SourceSpan, SpanMap, SyntaxKind};
use crate::core::{Chan, Formula, Sequent, Signature, Term};

/// A sequent and a term read from one `sequent --- term` file.
#[derive(Clone, Debug)]
pub struct Paired {
    pub sequent: Sequent,
    pub term: Term,
    pub spans: SpanMap,
    pub kind: SyntaxKind,
}

const PROG_STARTS: &[&str] = &["input", "output", "split", "fork", "on", "stop", "close", "end"];

/// Guesses the syntax of a term from its first words.
pub fn sniff_syntax(text: &str) -> SyntaxKind {
    let words: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == '('))
        .filter(|w| !w.is_empty())
        .take(2)
        .collect();
    match words.as_slice() {
        [first, second, ..] if PROG_STARTS.contains(first) && crate::core::is_identifier(second) => {
            SyntaxKind::ProgLang
        }
        _ => SyntaxKind::TermCalc,
    }
}

/// Reads `sequent`, a line holding only `---`, then a term. Without an
/// explicit kind the term syntax is sniffed.
pub fn parse_paired(text: &str, kind: Option<SyntaxKind>) -> Result<Paired, ParseError> {
    let mut offset = 0usize;
    let mut split_at = None;
    for (lineno, line) in text.split_inclusive('\n').enumerate() {
        if line.trim() == "---" {
            split_at = Some((offset, offset + line.len(), lineno + 1));
            break;
        }
        offset += line.len();
    }
    let Some((sep_start, body_start, body_line)) = split_at else {
        let end = SourceSpan::new(text.len(), text.len(), 1, 1, 1, 1);
        return Err(ParseError::new(end, "missing `---` line between sequent and term"));
    };
    let sequent = super::parse_sequent(&text[..sep_start])?;
    let body = &text[body_start..];
    let kind = kind.unwrap_or_else(|| sniff_syntax(body));
    let (term, spans) = super::parse_term_spanned(body, kind).map_err(|e| e.shifted(body_start, body_line))?;
    let spans = spans.into_iter().map(|(p, s)| (p, s.shifted(body_start, body_line))).collect();
    Ok(Paired { sequent, term, spans, kind })
}

/// Reads declarations `atom A, B` and `axiom f : X, Y -> Z`.
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let mut p = Parser::new(text)?;
    let mut sig = Signature::empty();
    let mut pending = Vec::new();
    while !p.at_eof() {
        let sp = p.span();
        let (kw, _) = p.ident()?;
        match kw.as_str() {
            "atom" => loop {
                let (a, _) = p.ident()?;
                sig.add_atom(&a);
                if !p.eat(&Tok::Comma) {
                    break;
                }
            },
            "axiom" => {
                let (name, nsp) = p.ident()?;
                p.expect(Tok::Colon)?;
                let ins = formula_list(&mut p)?;
                p.expect(Tok::Arrow)?;
                let outs = formula_list(&mut p)?;
                pending.push((name, nsp, ins, outs));
            }
            _ => return Err(ParseError::new(sp, format!("expected `atom` or `axiom`, found `{kw}`"))),
        }
    }
    for (name, sp, ins, outs) in pending {
        let mat = |xs: Vec<Raw>| -> Vec<Formula> {
            xs.iter()
                .map(|x| {
                    let mut taken = BTreeSet::new();
                    x.materialize(&Chan::from("x"), &mut taken)
                })
                .collect()
        };
        sig.add_axiom(&name, mat(ins), mat(outs)).map_err(|e| ParseError::core(sp, e))?;
    }
    Ok(sig)
}

fn formula_list(p: &mut Parser) -> Result<Vec<Raw>, ParseError> {
    let mut out = Vec::new();
    let stop = |p: &Parser| {
        p.at_eof() || *p.peek() == Tok::Arrow || (p.is_kw("atom") || p.is_kw("axiom")) && p.line_start()
    };
    if stop(p) {
        return Ok(out);
    }
    loop {
        out.push(p.raw_formula()?);
        if !p.eat(&Tok::Comma) {
            return Ok(out);
        }
    }
}
