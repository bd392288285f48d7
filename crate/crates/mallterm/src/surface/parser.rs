use std::collections::BTreeSet;

use super::lexer::{lex, Tok, Token};
use super::{ParseError, SourceSpan, SpanMap, SyntaxKind};
use crate::core::{Arm, Chan, CoreError, Formula, Path, Sequent, Tag, Term};

/// A formula before implicit tensor/par labels are filled in.
#[derive(Clone, Debug)]
pub(crate) enum Raw {
    Atom(String),
    Sum(Vec<(Tag, Raw)>),
    Prod(Vec<(Tag, Raw)>),
    Tensor(Vec<(Option<Chan>, Raw)>),
    Par(Vec<(Option<Chan>, Raw)>),
}

impl Raw {
    fn labels(&self, out: &mut Vec<Chan>) {
        match self {
            Raw::Atom(_) => {}
            Raw::Sum(ps) | Raw::Prod(ps) => ps.iter().for_each(|(_, x)| x.labels(out)),
            Raw::Tensor(ps) | Raw::Par(ps) => {
                for (c, x) in ps {
                    out.extend(c.iter().cloned());
                    x.labels(out);
                }
            }
        }
    }

    /// Names unlabeled components `<parent>_<i>`, priming on collision.
    pub(crate) fn materialize(&self, parent: &Chan, taken: &mut BTreeSet<Chan>) -> Formula {
        match self {
            Raw::Atom(a) => Formula::Atom(a.clone()),
            Raw::Sum(ps) => Formula::Sum(ps.iter().map(|(t, x)| (t.clone(), x.materialize(parent, taken))).collect()),
            Raw::Prod(ps) => Formula::Prod(ps.iter().map(|(t, x)| (t.clone(), x.materialize(parent, taken))).collect()),
            Raw::Tensor(ps) | Raw::Par(ps) => {
                let parts = ps
                    .iter()
                    .enumerate()
                    .map(|(i, (c, x))| {
                        let name = match c {
                            Some(c) => c.clone(),
                            None => {
                                let base = Chan::from(format!("{parent}_{}", i + 1).as_str());
                                let name = if taken.contains(&base) {
                                    crate::core::fresh_primed(&base, taken)
                                } else {
                                    base
                                };
                                taken.insert(name.clone());
                                name
                            }
                        };
                        let inner = x.materialize(&name, taken);
                        (name, inner)
                    })
                    .collect();
                if matches!(self, Raw::Tensor(_)) {
                    Formula::Tensor(parts)
                } else {
                    Formula::Par(parts)
                }
            }
        }
    }
}

const PROG_KEYWORDS: &[&str] = &["input", "output", "split", "fork", "on", "stop", "close", "end"];

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    spans: SpanMap,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0, spans: SpanMap::new() })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub(crate) fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, what: &str) -> Result<T, ParseError> {
        Err(ParseError::new(self.span(), format!("expected {what}, found {}", self.peek().describe())))
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().span)
        } else {
            self.error(&t.describe())
        }
    }

    pub(crate) fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<(String, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => self.error("an identifier"),
        }
    }

    fn chan(&mut self) -> Result<Chan, ParseError> {
        let (s, sp) = self.ident()?;
        Chan::new(s).map_err(|e| ParseError::core(sp, e))
    }

    fn tag(&mut self) -> Result<Tag, ParseError> {
        let (s, sp) = self.ident()?;
        Tag::new(s).map_err(|e| ParseError::core(sp, e))
    }

    pub(crate) fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    pub(crate) fn line_start(&self) -> bool {
        self.toks[self.pos].line_start
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    // ---- formulas ----

    pub(crate) fn raw_formula(&mut self) -> Result<Raw, ParseError> {
        let first = self.raw_primary()?;
        let op = match self.peek() {
            Tok::Star => Tok::Star,
            Tok::Percent => Tok::Percent,
            _ => return Ok(first),
        };
        let mut parts = vec![(None, first)];
        while self.eat(&op) {
            parts.push((None, self.raw_primary()?));
        }
        if matches!(self.peek(), Tok::Star | Tok::Percent) {
            return Err(ParseError::new(self.span(), "mixed `*` and `%` need parentheses"));
        }
        Ok(if op == Tok::Star { Raw::Tensor(parts) } else { Raw::Par(parts) })
    }

    fn raw_primary(&mut self) -> Result<Raw, ParseError> {
        let sp = self.span();
        match self.peek().clone() {
            Tok::Num(n) if n == "0" => {
                self.bump();
                Ok(Raw::Sum(vec![]))
            }
            Tok::Num(n) if n == "1" => {
                self.bump();
                Ok(Raw::Prod(vec![]))
            }
            Tok::Ident(s) if s == "top" => {
                self.bump();
                Ok(Raw::Tensor(vec![]))
            }
            Tok::Ident(s) if s == "bot" => {
                self.bump();
                Ok(Raw::Par(vec![]))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Raw::Atom(s))
            }
            Tok::LBrace | Tok::LBrack => {
                let sum = self.bump().tok == Tok::LBrace;
                let close = if sum { Tok::RBrace } else { Tok::RBrack };
                let mut parts: Vec<(Tag, Raw)> = Vec::new();
                if !self.eat(&close) {
                    loop {
                        let tsp = self.span();
                        let t = self.tag()?;
                        if parts.iter().any(|(u, _)| *u == t) {
                            return Err(ParseError::core(tsp, CoreError::DuplicateTag(t)));
                        }
                        self.expect(Tok::Colon)?;
                        parts.push((t, self.raw_formula()?));
                        if self.eat(&close) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                Ok(if sum { Raw::Sum(parts) } else { Raw::Prod(parts) })
            }
            Tok::Star | Tok::Percent => {
                let tensor = self.bump().tok == Tok::Star;
                self.expect(Tok::LParen)?;
                let mut parts = Vec::new();
                if !self.eat(&Tok::RParen) {
                    loop {
                        let label = if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Colon {
                            let c = self.chan()?;
                            self.bump();
                            Some(c)
                        } else {
                            None
                        };
                        parts.push((label, self.raw_formula()?));
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                Ok(if tensor { Raw::Tensor(parts) } else { Raw::Par(parts) })
            }
            Tok::LParen => {
                self.bump();
                let x = self.raw_formula()?;
                self.expect(Tok::RParen)?;
                Ok(x)
            }
            _ => Err(ParseError::new(sp, format!("expected a formula, found {}", self.peek().describe()))),
        }
    }

    /// A formula attached to `parent`, labels filled in and validated.
    pub(crate) fn formula_at(&mut self, parent: &Chan) -> Result<Formula, ParseError> {
        let sp = self.span();
        let raw = self.raw_formula()?;
        let sp = sp.join(self.prev_span());
        let mut labels = Vec::new();
        raw.labels(&mut labels);
        let mut taken: BTreeSet<Chan> = labels.into_iter().collect();
        taken.insert(parent.clone());
        let x = raw.materialize(parent, &mut taken);
        x.validate().map_err(|e| ParseError::core(sp, e))?;
        if x.nested_channels().contains(parent) {
            return Err(ParseError::core(sp, CoreError::DuplicateChannel(parent.clone())));
        }
        Ok(x)
    }

    fn at_entry(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Colon
    }

    fn sequent_side(&mut self) -> Result<Vec<(Chan, Raw, SourceSpan)>, ParseError> {
        let mut out = Vec::new();
        if !self.at_entry() {
            return Ok(out);
        }
        loop {
            let csp = self.span();
            let c = self.chan()?;
            self.expect(Tok::Colon)?;
            out.push((c, self.raw_formula()?, csp));
            if *self.peek() == Tok::Comma && matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Colon {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    pub(crate) fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let start = self.span();
        let dom = self.sequent_side()?;
        self.expect(Tok::Turnstile)?;
        let cod = self.sequent_side()?;
        let whole = start.join(self.prev_span());
        let mut taken: BTreeSet<Chan> = BTreeSet::new();
        for (c, raw, _) in dom.iter().chain(&cod) {
            taken.insert(c.clone());
            let mut labels = Vec::new();
            raw.labels(&mut labels);
            taken.extend(labels);
        }
        let mat = |v: Vec<(Chan, Raw, SourceSpan)>, taken: &mut BTreeSet<Chan>| {
            v.into_iter()
                .map(|(c, raw, _)| {
                    let x = raw.materialize(&c, taken);
                    (c, x)
                })
                .collect::<Vec<_>>()
        };
        let dom = mat(dom, &mut taken);
        let cod = mat(cod, &mut taken);
        Sequent::new(dom, cod).map_err(|e| ParseError::core(whole, e))
    }

    // ---- terms ----

    pub(crate) fn term(&mut self, kind: SyntaxKind) -> Result<Term, ParseError> {
        let mut path = Vec::new();
        match kind {
            SyntaxKind::TermCalc => self.tc_term(&mut path),
            SyntaxKind::ProgLang => self.pl_term(&mut path),
        }
    }

    pub(crate) fn take_spans(&mut self) -> SpanMap {
        std::mem::take(&mut self.spans)
    }

    fn record(&mut self, path: &Path, start: SourceSpan) {
        let sp = start.join(self.prev_span());
        self.spans.insert(path.clone(), sp);
    }

    fn child<T>(
        &mut self,
        path: &mut Path,
        i: usize,
        f: impl FnOnce(&mut Self, &mut Path) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        path.push(i);
        let r = f(self, path);
        path.pop();
        r
    }

    fn chan_list(&mut self, close: &[Tok]) -> Result<Vec<Chan>, ParseError> {
        let mut out = Vec::new();
        if close.contains(self.peek()) {
            return Ok(out);
        }
        loop {
            out.push(self.chan()?);
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn axiom_tail(&mut self, name: String) -> Result<Term, ParseError> {
        self.expect(Tok::LParen)?;
        let ins = self.chan_list(&[Tok::Semi, Tok::RParen])?;
        let outs = if self.eat(&Tok::Semi) { self.chan_list(&[Tok::RParen])? } else { Vec::new() };
        self.expect(Tok::RParen)?;
        Ok(Term::Axiom { name, ins, outs })
    }

    fn cut_annotation(&mut self, chan: &Chan) -> Result<Option<Formula>, ParseError> {
        if self.eat(&Tok::Colon) {
            Ok(Some(self.formula_at(chan)?))
        } else {
            Ok(None)
        }
    }

    /// `:: sequent` on a nullary case, naming its whole context.
    fn context_annotation(&mut self) -> Result<Sequent, ParseError> {
        self.expect(Tok::Colon)?;
        self.expect(Tok::Colon)?;
        self.sequent()
    }

    fn tc_term(&mut self, path: &mut Path) -> Result<Term, ParseError> {
        let start = self.span();
        if self.eat(&Tok::LParen) {
            let t = self.tc_term(path)?;
            self.expect(Tok::RParen)?;
            self.record(path, start);
            return Ok(t);
        }
        let (name, _) = self.ident()?;
        let t = if name == "cut" && matches!(self.peek(), Tok::Ident(_)) {
            let chan = self.chan()?;
            let ty = self.cut_annotation(&chan)?;
            self.expect(Tok::LParen)?;
            let left = self.child(path, 0, |p, path| p.tc_term(path))?;
            self.expect(Tok::Comma)?;
            let right = self.child(path, 1, |p, path| p.tc_term(path))?;
            self.expect(Tok::RParen)?;
            Term::Cut { chan, ty, left: Box::new(left), right: Box::new(right) }
        } else {
            match self.peek().clone() {
                Tok::EqEq | Tok::Eq => {
                    self.bump();
                    let a = Chan::new(name).map_err(|e| ParseError::core(start, e))?;
                    Term::Id(a, self.chan()?)
                }
                Tok::LParen => self.axiom_tail(name)?,
                Tok::LBrace => {
                    self.bump();
                    let chan = Chan::new(name).map_err(|e| ParseError::core(start, e))?;
                    let mut branches = Vec::new();
                    if *self.peek() == Tok::Colon {
                        let ctx = self.context_annotation()?;
                        self.expect(Tok::RBrace)?;
                        self.record(path, start);
                        return Ok(Term::Case { chan, branches, ctx: Some(ctx) });
                    }
                    if !self.eat(&Tok::RBrace) {
                        loop {
                            let tag = self.tag()?;
                            self.expect(Tok::FatArrow)?;
                            let i = branches.len();
                            let body = self.child(path, i, |p, path| p.tc_term(path))?;
                            branches.push((tag, body));
                            if self.eat(&Tok::RBrace) {
                                break;
                            }
                            self.expect(Tok::Bar)?;
                        }
                    }
                    Term::Case { chan, branches, ctx: None }
                }
                Tok::LBrack => {
                    self.bump();
                    let chan = Chan::new(name).map_err(|e| ParseError::core(start, e))?;
                    let tag = self.tag()?;
                    self.expect(Tok::RBrack)?;
                    self.expect(Tok::Dot)?;
                    let body = self.child(path, 0, |p, path| p.tc_term(path))?;
                    Term::Select { chan, tag, body: Box::new(body) }
                }
                Tok::Lt => {
                    self.bump();
                    let chan = Chan::new(name).map_err(|e| ParseError::core(start, e))?;
                    if self.eat(&Tok::Gt) {
                        Term::Fork { chan, arms: vec![] }
                    } else if self.eat(&Tok::LParen) {
                        let parts = self.chan_list(&[Tok::RParen])?;
                        self.expect(Tok::RParen)?;
                        self.expect(Tok::FatArrow)?;
                        let body = self.child(path, 0, |p, path| p.tc_term(path))?;
                        self.expect(Tok::Gt)?;
                        Term::Split { chan, parts, body: Box::new(body) }
                    } else {
                        let mut arms = Vec::new();
                        loop {
                            let part = self.chan()?;
                            self.expect(Tok::Bar)?;
                            self.expect(Tok::LBrace)?;
                            let owns = self.chan_list(&[Tok::RBrace])?;
                            self.expect(Tok::RBrace)?;
                            self.expect(Tok::FatArrow)?;
                            let i = arms.len();
                            let body = self.child(path, i, |p, path| p.tc_term(path))?;
                            arms.push(Arm { part, owns: owns.into_iter().collect(), body });
                            if self.eat(&Tok::Gt) {
                                break;
                            }
                            self.expect(Tok::Semi)?;
                        }
                        Term::Fork { chan, arms }
                    }
                }
                _ => return self.error("`==`, `{`, `[`, `<` or `(` after a channel"),
            }
        };
        self.record(path, start);
        Ok(t)
    }

    fn pl_keyword(&self) -> Option<&'static str> {
        match self.peek() {
            Tok::Ident(s) if matches!(self.peek_at(1), Tok::Ident(_)) => {
                PROG_KEYWORDS.iter().copied().find(|k| k == s)
            }
            _ => None,
        }
    }

    fn owns_list(&mut self) -> Result<Vec<Chan>, ParseError> {
        if self.eat(&Tok::LBrace) {
            let v = self.chan_list(&[Tok::RBrace])?;
            self.expect(Tok::RBrace)?;
            return Ok(v);
        }
        let mut out = Vec::new();
        while matches!(self.peek(), Tok::Ident(s) if s != "in") {
            out.push(self.chan()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(out)
    }

    fn pl_term(&mut self, path: &mut Path) -> Result<Term, ParseError> {
        let start = self.span();
        if self.eat(&Tok::LParen) {
            let t = self.pl_term(path)?;
            self.expect(Tok::RParen)?;
            self.record(path, start);
            return Ok(t);
        }
        let t = match self.pl_keyword() {
            Some("input") => {
                self.bump();
                if self.is_kw("on") && matches!(self.peek_at(1), Tok::Ident(_)) {
                    self.bump();
                }
                let chan = self.chan()?;
                self.expect_kw("of")?;
                let mut branches = Vec::new();
                if *self.peek() != Tok::Bar {
                    return self.error("`|`");
                }
                while self.eat(&Tok::Bar) {
                    let tag = self.tag()?;
                    self.expect(Tok::FatArrow)?;
                    let i = branches.len();
                    let body = self.child(path, i, |p, path| p.pl_term(path))?;
                    branches.push((tag, body));
                }
                Term::Case { chan, branches, ctx: None }
            }
            Some("stop") => {
                self.bump();
                let chan = self.chan()?;
                let ctx = if *self.peek() == Tok::LBrace && *self.peek_at(1) == Tok::Colon {
                    self.bump();
                    let ctx = self.context_annotation()?;
                    self.expect(Tok::RBrace)?;
                    Some(ctx)
                } else {
                    None
                };
                Term::Case { chan, branches: vec![], ctx }
            }
            Some("output") => {
                self.bump();
                let tag = self.tag()?;
                self.expect_kw("on")?;
                let chan = self.chan()?;
                self.expect_kw("in")?;
                let body = self.child(path, 0, |p, path| p.pl_term(path))?;
                Term::Select { chan, tag, body: Box::new(body) }
            }
            Some("split") => {
                self.bump();
                let chan = self.chan()?;
                self.expect_kw("as")?;
                let parts = if self.eat(&Tok::LParen) {
                    let v = self.chan_list(&[Tok::RParen])?;
                    self.expect(Tok::RParen)?;
                    v
                } else {
                    let mut v = Vec::new();
                    while matches!(self.peek(), Tok::Ident(s) if s != "in") {
                        v.push(self.chan()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    v
                };
                if parts.is_empty() {
                    return Err(ParseError::new(self.span(), "`split` needs at least one part; use `close`"));
                }
                self.expect_kw("in")?;
                let body = self.child(path, 0, |p, path| p.pl_term(path))?;
                Term::Split { chan, parts, body: Box::new(body) }
            }
            Some("close") => {
                self.bump();
                let chan = self.chan()?;
                self.expect_kw("in")?;
                let body = self.child(path, 0, |p, path| p.pl_term(path))?;
                Term::Split { chan, parts: vec![], body: Box::new(body) }
            }
            Some("fork") => {
                self.bump();
                let chan = self.chan()?;
                self.expect_kw("as")?;
                if *self.peek() != Tok::Bar {
                    return self.error("`|`");
                }
                let mut arms = Vec::new();
                while self.eat(&Tok::Bar) {
                    let part = self.chan()?;
                    self.expect_kw("with")?;
                    let owns = self.owns_list()?;
                    if !self.eat(&Tok::FatArrow) {
                        self.expect_kw("in")?;
                    }
                    let i = arms.len();
                    let body = self.child(path, i, |p, path| p.pl_term(path))?;
                    arms.push(Arm { part, owns: owns.into_iter().collect(), body });
                }
                Term::Fork { chan, arms }
            }
            Some("end") => {
                self.bump();
                Term::Fork { chan: self.chan()?, arms: vec![] }
            }
            Some("on") => {
                self.bump();
                let chan = self.chan()?;
                let ty = self.cut_annotation(&chan)?;
                self.expect_kw("plug")?;
                let left = self.child(path, 0, |p, path| p.pl_term(path))?;
                self.expect_kw("to")?;
                let right = self.child(path, 1, |p, path| p.pl_term(path))?;
                Term::Cut { chan, ty, left: Box::new(left), right: Box::new(right) }
            }
            _ => {
                let (name, _) = self.ident()?;
                match self.peek() {
                    Tok::EqEq | Tok::Eq => {
                        self.bump();
                        let a = Chan::new(name).map_err(|e| ParseError::core(start, e))?;
                        Term::Id(a, self.chan()?)
                    }
                    Tok::LParen => self.axiom_tail(name)?,
                    _ => return self.error("`==` or `(` after a name"),
                }
            }
        };
        self.record(path, start);
        Ok(t)
    }
}

/// Parses a formula; implicit labels are named after the channel `x`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_at(text, &Chan::from("x"))
}

/// Parses a formula attached to `chan`, naming implicit components
/// `<chan>_<i>`.
pub fn parse_formula_at(text: &str, chan: &Chan) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let x = p.formula_at(chan)?;
    p.finish()?;
    Ok(x)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(text)?;
    let s = p.sequent()?;
    p.finish()?;
    Ok(s)
}

pub fn parse_term(text: &str, kind: SyntaxKind) -> Result<Term, ParseError> {
    parse_term_spanned(text, kind).map(|(t, _)| t)
}

/// Parses a term and reports the source span of every node.
pub fn parse_term_spanned(text: &str, kind: SyntaxKind) -> Result<(Term, SpanMap), ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term(kind)?;
    p.finish()?;
    t.free_info().map_err(|e| ParseError::core(p.spans.get(&Vec::new()).copied().unwrap_or_default(), e))?;
    Ok((t, p.take_spans()))
}
