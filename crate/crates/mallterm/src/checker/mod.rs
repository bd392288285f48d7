//! Syntax-directed typechecking of terms against sequents, composition
//! along a channel, and expanded identities.

mod identity;
mod synth;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::core::{fresh_primed, Chan, Formula, Path, Sequent, Side, Signature, Term};
use crate::surface::{print_term, SourceSpan, SpanMap, SyntaxKind};

pub use identity::identity_term;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum TypeErrorKind {
    UnknownChannel,
    WrongConnective,
    TagNotInType,
    ArityMismatch,
    PartitionError,
    LeftoverChannels,
    SharedChannelInCut,
    AxiomSignatureMismatch,
    UninferableCut,
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    /// Path of the offending node.
    pub path: Path,
    pub span: Option<SourceSpan>,
    pub detail: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(sp) = self.span {
            write!(f, "{sp}: ")?;
        }
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

impl TypeError {
    fn new(kind: TypeErrorKind, path: &Path, detail: impl Into<String>) -> Self {
        TypeError { kind, path: path.clone(), span: None, detail: detail.into() }
    }

    /// Attaches the source span of the offending node, or of its closest
    /// recorded ancestor.
    pub fn located(mut self, spans: &SpanMap) -> Self {
        let mut p = self.path.clone();
        loop {
            if let Some(sp) = spans.get(&p) {
                self.span = Some(*sp);
                return self;
            }
            if p.pop().is_none() {
                return self;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("channel `{0}` has type {1} on the left but {2} on the right")]
    ChannelTypeMismatch(Chan, String, String),
    #[error("no channel `{0}` on the {1} side")]
    NoSuchChannel(Chan, &'static str),
}

/// The sequent at one node, with the decorations of its children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deco {
    pub seq: Sequent,
    pub kids: Vec<Deco>,
}

/// A term together with the sequent of every node. Cut formulas and
/// nullary contexts are filled in on `term`.
#[derive(Clone, Debug)]
pub struct TypedTerm {
    pub term: Term,
    pub seq: Sequent,
    pub deco: Deco,
    pub sig: Arc<Signature>,
}

impl TypedTerm {
    pub fn seq_at(&self, path: &[usize]) -> Option<&Sequent> {
        let mut d = &self.deco;
        for &i in path {
            d = d.kids.get(i)?;
        }
        Some(&d.seq)
    }

    /// Side of `chan` in the sequent at `path`.
    pub fn side_at(&self, path: &[usize], chan: &Chan) -> Option<Side> {
        self.seq_at(path)?.get(chan).map(|(s, _)| s)
    }

    /// Checks another term against the same sequent and signature.
    pub fn recheck(&self, term: &Term) -> Result<TypedTerm, TypeError> {
        check_arc(term, &self.seq, self.sig.clone())
    }

    /// The term with every annotation dropped that the checker recovers by
    /// itself.
    pub fn minimal_term(&self) -> Term {
        let key = annotation_key(&self.term);
        let mut t = self.term.clone();
        for p in t.paths() {
            let mut trial = t.clone();
            match trial.at_mut(&p) {
                Some(Term::Cut { ty, .. }) if ty.is_some() => *ty = None,
                Some(Term::Case { branches, ctx, .. }) if branches.is_empty() && ctx.is_some() => *ctx = None,
                _ => continue,
            }
            if let Ok(back) = check_arc(&trial, &self.seq, self.sig.clone()) {
                if annotation_key(&back.term) == key {
                    t = trial;
                }
            }
        }
        t
    }

    pub fn print(&self, kind: SyntaxKind) -> String {
        print_term(&self.minimal_term(), kind)
    }
}

/// The cut formulas and nullary contexts of a term in preorder, labels
/// ignored.
pub fn annotation_key(t: &Term) -> String {
    let mut out = String::new();
    fn go(t: &Term, out: &mut String) {
        match t {
            Term::Cut { ty: Some(x), .. } => out.push_str(&format!("[{}]", x.type_key())),
            Term::Case { ctx: Some(s), .. } => out.push_str(&format!("[{}]", s.type_key())),
            Term::Cut { .. } | Term::Case { .. } => out.push_str("[?]"),
            _ => {}
        }
        for c in t.children() {
            go(c, out);
        }
    }
    go(t, &mut out);
    out
}

pub fn check(t: &Term, s: &Sequent, sig: &Signature) -> Result<TypedTerm, TypeError> {
    check_arc(t, s, Arc::new(sig.clone()))
}

pub fn check_arc(t: &Term, s: &Sequent, sig: Arc<Signature>) -> Result<TypedTerm, TypeError> {
    let mut path = Vec::new();
    let (term, deco) = Checker { sig: &sig }.node(t, s.clone(), &mut path)?;
    Ok(TypedTerm { term, seq: s.clone(), deco, sig })
}

use TypeErrorKind::*;

struct Checker<'a> {
    sig: &'a Signature,
}

fn names(cs: &BTreeSet<Chan>) -> String {
    cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

fn sequent_of(parts: Vec<(Side, Chan, Formula)>) -> Sequent {
    let mut s = Sequent::empty();
    for (side, c, x) in parts {
        s.side_mut(side).insert(c, x);
    }
    s
}

impl Checker<'_> {
    fn lookup<'s>(&self, seq: &'s Sequent, c: &Chan, path: &Path) -> Result<(Side, &'s Formula), TypeError> {
        seq.get(c).ok_or_else(|| TypeError::new(UnknownChannel, path, format!("`{c}` is not in {seq}")))
    }

    fn exactly(&self, seq: &Sequent, used: &[&Chan], path: &Path) -> Result<(), TypeError> {
        let extra: BTreeSet<Chan> = seq.channels().into_iter().filter(|c| !used.contains(&c)).collect();
        if extra.is_empty() {
            Ok(())
        } else {
            Err(TypeError::new(LeftoverChannels, path, format!("unused channels: {}", names(&extra))))
        }
    }

    fn child(&self, t: &Term, seq: Sequent, path: &mut Path, i: usize) -> Result<(Term, Deco), TypeError> {
        path.push(i);
        let r = self.node(t, seq, path);
        path.pop();
        r
    }

    fn binders_fresh(&self, seq: &Sequent, chan: &Chan, bound: &[&Chan], path: &Path) -> Result<(), TypeError> {
        let mut seen = BTreeSet::new();
        for b in bound {
            if (seq.contains(b) && *b != chan) || !seen.insert(*b) {
                return Err(TypeError::new(PartitionError, path, format!("bound name `{b}` clashes with another channel")));
            }
        }
        Ok(())
    }

    fn node(&self, t: &Term, seq: Sequent, path: &mut Path) -> Result<(Term, Deco), TypeError> {
        let leaf = |term: Term, seq: Sequent| Ok((term, Deco { seq, kids: vec![] }));
        match t {
            Term::Id(a, b) => {
                let (sa, xa) = self.lookup(&seq, a, path)?;
                let (sb, xb) = self.lookup(&seq, b, path)?;
                if a == b || sa == sb {
                    return Err(TypeError::new(WrongConnective, path, format!("`{a}` and `{b}` are on the same side")));
                }
                if !xa.is_atom() || !xa.same_type(xb) {
                    return Err(TypeError::new(
                        WrongConnective,
                        path,
                        format!("identity needs one atom on both ends, found {xa} and {xb}"),
                    ));
                }
                self.exactly(&seq, &[a, b], path)?;
                leaf(t.clone(), seq)
            }
            Term::Axiom { name, ins, outs } => {
                let ty = self.sig.axiom(name).ok_or_else(|| {
                    TypeError::new(AxiomSignatureMismatch, path, format!("axiom `{name}` is not declared"))
                })?;
                if ty.ins.len() != ins.len() || ty.outs.len() != outs.len() {
                    return Err(TypeError::new(
                        AxiomSignatureMismatch,
                        path,
                        format!("axiom `{name}` takes {} inputs and {} outputs", ty.ins.len(), ty.outs.len()),
                    ));
                }
                for (cs, xs, side) in [(ins, &ty.ins, Side::Dom), (outs, &ty.outs, Side::Cod)] {
                    for (c, x) in cs.iter().zip(xs) {
                        let (s, y) = self.lookup(&seq, c, path)?;
                        if s != side || !x.same_type(y) {
                            return Err(TypeError::new(
                                AxiomSignatureMismatch,
                                path,
                                format!("axiom `{name}` expects `{c}` : {x} on the {side:?} side"),
                            ));
                        }
                    }
                }
                let used: Vec<&Chan> = ins.iter().chain(outs).collect();
                self.exactly(&seq, &used, path)?;
                leaf(t.clone(), seq)
            }
            Term::Case { chan, branches, ctx } => {
                let (side, x) = self.lookup(&seq, chan, path)?;
                let ok = matches!((side, x), (Side::Dom, Formula::Sum(_)) | (Side::Cod, Formula::Prod(_)));
                if !ok {
                    return Err(TypeError::new(
                        WrongConnective,
                        path,
                        format!("case on `{chan}` needs a sum in the domain or a product in the codomain, found {x}"),
                    ));
                }
                let comps = x.tagged().expect("tagged").to_vec();
                if branches.is_empty() {
                    if !comps.is_empty() {
                        return Err(TypeError::new(ArityMismatch, path, format!("no branches for {x}")));
                    }
                    if let Some(s) = ctx {
                        if !s.same_type(&seq) {
                            return Err(TypeError::new(
                                LeftoverChannels,
                                path,
                                format!("annotated context {s} differs from {seq}"),
                            ));
                        }
                    }
                    let term = Term::Case { chan: chan.clone(), branches: vec![], ctx: Some(seq.clone()) };
                    return leaf(term, seq);
                }
                for (tag, _) in branches {
                    if x.component_for_tag(tag).is_none() {
                        return Err(TypeError::new(TagNotInType, path, format!("tag `{tag}` is not in {x}")));
                    }
                }
                let seen: BTreeSet<_> = branches.iter().map(|(t, _)| t).collect();
                if seen.len() != branches.len() || branches.len() != comps.len() {
                    return Err(TypeError::new(
                        ArityMismatch,
                        path,
                        format!("case on `{chan}` needs one branch per tag of {x}"),
                    ));
                }
                let mut out = Vec::new();
                let mut kids = Vec::new();
                for (i, (tag, b)) in branches.iter().enumerate() {
                    let mut s = seq.clone();
                    s.replace(chan, x.component_for_tag(tag).expect("checked").clone());
                    let (b, d) = self.child(b, s, path, i)?;
                    out.push((tag.clone(), b));
                    kids.push(d);
                }
                Ok((Term::Case { chan: chan.clone(), branches: out, ctx: None }, Deco { seq, kids }))
            }
            Term::Select { chan, tag, body } => {
                let (side, x) = self.lookup(&seq, chan, path)?;
                let ok = matches!((side, x), (Side::Dom, Formula::Prod(_)) | (Side::Cod, Formula::Sum(_)));
                if !ok {
                    return Err(TypeError::new(
                        WrongConnective,
                        path,
                        format!("select on `{chan}` needs a product in the domain or a sum in the codomain, found {x}"),
                    ));
                }
                let comp = x
                    .component_for_tag(tag)
                    .ok_or_else(|| TypeError::new(TagNotInType, path, format!("tag `{tag}` is not in {x}")))?
                    .clone();
                let mut s = seq.clone();
                s.replace(chan, comp);
                let (b, d) = self.child(body, s, path, 0)?;
                let term = Term::Select { chan: chan.clone(), tag: tag.clone(), body: Box::new(b) };
                Ok((term, Deco { seq, kids: vec![d] }))
            }
            Term::Split { chan, parts, body } => {
                let (side, x) = self.lookup(&seq, chan, path)?;
                let ok = matches!((side, x), (Side::Dom, Formula::Tensor(_)) | (Side::Cod, Formula::Par(_)));
                if !ok {
                    return Err(TypeError::new(
                        WrongConnective,
                        path,
                        format!("split on `{chan}` needs a tensor in the domain or a par in the codomain, found {x}"),
                    ));
                }
                let comps = x.components().expect("components");
                if comps.len() != parts.len() {
                    return Err(TypeError::new(
                        ArityMismatch,
                        path,
                        format!("`{chan}` : {x} has {} components, split names {}", comps.len(), parts.len()),
                    ));
                }
                self.binders_fresh(&seq, chan, &parts.iter().collect::<Vec<_>>(), path)?;
                let mut s = seq.clone();
                s.splice(chan, parts.iter().cloned().zip(comps.iter().map(|(_, y)| y.clone())).collect());
                let (b, d) = self.child(body, s, path, 0)?;
                let term = Term::Split { chan: chan.clone(), parts: parts.clone(), body: Box::new(b) };
                Ok((term, Deco { seq, kids: vec![d] }))
            }
            Term::Fork { chan, arms } => {
                let (side, x) = self.lookup(&seq, chan, path)?;
                let ok = matches!((side, x), (Side::Dom, Formula::Par(_)) | (Side::Cod, Formula::Tensor(_)));
                if !ok {
                    return Err(TypeError::new(
                        WrongConnective,
                        path,
                        format!("fork on `{chan}` needs a par in the domain or a tensor in the codomain, found {x}"),
                    ));
                }
                let comps = x.components().expect("components").to_vec();
                if comps.len() != arms.len() {
                    return Err(TypeError::new(
                        ArityMismatch,
                        path,
                        format!("`{chan}` : {x} has {} components, fork has {} arms", comps.len(), arms.len()),
                    ));
                }
                if arms.is_empty() {
                    self.exactly(&seq, &[chan], path)?;
                    return leaf(t.clone(), seq);
                }
                self.binders_fresh(&seq, chan, &arms.iter().map(|a| &a.part).collect::<Vec<_>>(), path)?;
                let rest: BTreeSet<Chan> = seq.channels().into_iter().filter(|c| c != chan).collect();
                let mut covered = BTreeSet::new();
                for a in arms {
                    for c in &a.owns {
                        if !rest.contains(c) {
                            return Err(TypeError::new(
                                PartitionError,
                                path,
                                format!("arm `{}` owns `{c}`, which is not a context channel", a.part),
                            ));
                        }
                        if !covered.insert(c.clone()) {
                            return Err(TypeError::new(PartitionError, path, format!("`{c}` is owned by two arms")));
                        }
                    }
                }
                if covered != rest {
                    let missing: BTreeSet<Chan> = rest.difference(&covered).cloned().collect();
                    return Err(TypeError::new(
                        PartitionError,
                        path,
                        format!("no arm owns {}", names(&missing)),
                    ));
                }
                let mut out = Vec::new();
                let mut kids = Vec::new();
                for (i, (a, (_, y))) in arms.iter().zip(&comps).enumerate() {
                    let mut s = seq.restrict(&a.owns);
                    s.side_mut(side).insert(a.part.clone(), y.clone());
                    let (b, d) = self.child(&a.body, s, path, i)?;
                    out.push(crate::core::Arm { part: a.part.clone(), owns: a.owns.clone(), body: b });
                    kids.push(d);
                }
                Ok((Term::Fork { chan: chan.clone(), arms: out }, Deco { seq, kids }))
            }
            Term::Cut { chan, ty, left, right } => {
                if seq.contains(chan) {
                    return Err(TypeError::new(
                        SharedChannelInCut,
                        path,
                        format!("cut channel `{chan}` is also a context channel"),
                    ));
                }
                let info = |s: &Term| {
                    s.free_info().map_err(|e| TypeError::new(SharedChannelInCut, path, e.to_string()))
                };
                let (mut fl, lo) = info(left)?;
                let (mut fr, ro) = info(right)?;
                fl.remove(chan);
                fr.remove(chan);
                if let Some(c) = fl.intersection(&fr).next() {
                    return Err(TypeError::new(
                        SharedChannelInCut,
                        path,
                        format!("`{c}` is shared by both sides of the cut on `{chan}`"),
                    ));
                }
                let all = seq.channels();
                if let Some(c) = fl.iter().chain(&fr).find(|c| !all.contains(*c)) {
                    return Err(TypeError::new(UnknownChannel, path, format!("`{c}` is not in {seq}")));
                }
                let rest: BTreeSet<Chan> = all.iter().filter(|c| !fl.contains(*c) && !fr.contains(*c)).cloned().collect();
                if !rest.is_empty() {
                    match (lo, ro) {
                        (true, false) => fl.extend(rest),
                        (false, true) => fr.extend(rest),
                        (true, true) => {
                            return Err(TypeError::new(
                                LeftoverChannels,
                                path,
                                format!(
                                    "cannot tell which side of the cut on `{chan}` gets {}; annotate the empty case",
                                    names(&rest)
                                ),
                            ))
                        }
                        (false, false) => {
                            return Err(TypeError::new(LeftoverChannels, path, format!("unused channels: {}", names(&rest))))
                        }
                    }
                }
                let mut ls = seq.restrict(&fl);
                let rs = seq.restrict(&fr);
                let z = match ty {
                    Some(z) => z.clone(),
                    None => synth::cut_formula(self.sig, left, &ls, right, &rs, chan).ok_or_else(|| {
                        TypeError::new(UninferableCut, path, format!("cannot infer the formula of the cut on `{chan}`"))
                    })?,
                };
                ls.cod.insert(chan.clone(), z.clone());
                let mut rs2 = Sequent::empty();
                rs2.dom.insert(chan.clone(), z.clone());
                rs2.dom.extend(rs.dom);
                rs2.cod = rs.cod;
                let (l, dl) = self.child(left, ls, path, 0)?;
                let (r, dr) = self.child(right, rs2, path, 1)?;
                let term = Term::Cut { chan: chan.clone(), ty: Some(z), left: Box::new(l), right: Box::new(r) };
                Ok((term, Deco { seq, kids: vec![dl, dr] }))
            }
        }
    }
}

/// `f ;gamma g`: plugs the codomain channel `gamma` of `f` into the domain
/// channel `gamma` of `g`, renaming names of `g` that clash with `f`.
pub fn compose(f: &TypedTerm, g: &TypedTerm, gamma: &Chan) -> Result<TypedTerm, ComposeError> {
    let x = f.seq.cod.get(gamma).ok_or_else(|| ComposeError::NoSuchChannel(gamma.clone(), "codomain"))?;
    let y = g.seq.dom.get(gamma).ok_or_else(|| ComposeError::NoSuchChannel(gamma.clone(), "domain"))?;
    if !x.same_type(y) {
        return Err(ComposeError::ChannelTypeMismatch(gamma.clone(), x.to_string(), y.to_string()));
    }
    let mut used = f.term.all_names();
    used.extend(f.seq.channels());
    used.extend(g.term.all_names());
    used.extend(g.seq.channels());
    let mut m = BTreeMap::new();
    for c in g.seq.channels() {
        if c != *gamma && f.seq.contains(&c) {
            let n = fresh_primed(&c, &used);
            used.insert(n.clone());
            m.insert(c, n);
        }
    }
    let mut avoid = f.term.all_names();
    avoid.extend(f.seq.channels());
    let gt = g.term.rename_free(&m, &avoid);
    let gseq = g.seq.rename(|c| m.get(c).cloned().unwrap_or_else(|| c.clone()));
    let mut seq = Sequent::empty();
    seq.dom.extend(f.seq.dom.iter().map(|(c, x)| (c.clone(), x.clone())));
    seq.dom.extend(gseq.dom.iter().filter(|(c, _)| *c != gamma).map(|(c, x)| (c.clone(), x.clone())));
    seq.cod.extend(f.seq.cod.iter().filter(|(c, _)| *c != gamma).map(|(c, x)| (c.clone(), x.clone())));
    seq.cod.extend(gseq.cod.iter().map(|(c, x)| (c.clone(), x.clone())));
    let mut sig = (*f.sig).clone();
    for (n, a) in &g.sig.axioms {
        if !sig.axioms.contains_key(n) {
            sig.axioms.insert(n.clone(), a.clone());
        }
    }
    sig.atoms.extend(g.sig.atoms.iter().cloned());
    let cut = Term::Cut { chan: gamma.clone(), ty: Some(x.clone()), left: Box::new(f.term.clone()), right: Box::new(gt) };
    let typed = check_arc(&cut, &seq, Arc::new(sig)).expect("composite of well-typed terms checks");
    Ok(typed)
}

/// A sequent from `(side, channel, formula)` triples in order.
pub fn sequent_from(parts: Vec<(Side, Chan, Formula)>) -> Sequent {
    sequent_of(parts)
}

#[cfg(test)]
mod tests;
