//! The permuting conversions (15)-(24): two adjacent rules on different
//! channels trade places. Nullary cases also absorb or emit a rule on another
//! channel, which is how the empty-index variants arise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::checker::TypedTerm;
use crate::core::{fresh_primed, Arm, Chan, Path, Sequent, Signature, Term};
use crate::prover::{step_for, Prover, Step};
use crate::rewriter::{RuleId, Variant};
use crate::surface::{print_term, SyntaxKind};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// One conversion step: the node at `path` is replaced by `replacement`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Conversion {
    pub path: Path,
    pub rule: RuleId,
    pub direction: Direction,
    #[serde(serialize_with = "as_text")]
    pub replacement: Term,
}

fn as_text<S: Serializer>(t: &Term, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&print_term(t, SyntaxKind::TermCalc))
}

impl fmt::Display for Conversion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} at {:?}", self.rule, self.direction, self.path)
    }
}

#[derive(Clone, Debug, Error)]
pub enum ConversionError {
    #[error("{0} does not apply here")]
    NotAConversion(String),
}

/// Cap on the proofs enumerated for the idle arms of an emitted fork.
const ARM_PROOF_BUDGET: usize = 2_000;

/// The rule family of a node: cotuple, injection, split, fork.
fn kind(t: &Term) -> Option<u8> {
    match t {
        Term::Case { .. } => Some(0),
        Term::Select { .. } => Some(1),
        Term::Split { .. } => Some(2),
        Term::Fork { .. } => Some(3),
        _ => None,
    }
}

fn index_len(t: &Term) -> Option<usize> {
    match t {
        Term::Case { branches, .. } => Some(branches.len()),
        Term::Split { parts, .. } => Some(parts.len()),
        Term::Fork { arms, .. } => Some(arms.len()),
        _ => None,
    }
}

fn number(a: u8, b: u8) -> u8 {
    match (a.min(b), a.max(b)) {
        (0, 0) => 15,
        (0, 1) => 16,
        (0, 2) => 17,
        (0, 3) => 18,
        (1, 1) => 19,
        (1, 2) => 20,
        (1, 3) => 21,
        (2, 2) => 22,
        (2, 3) => 23,
        _ => 24,
    }
}

pub fn is_symmetric(n: u8) -> bool {
    matches!(n, 15 | 19 | 22 | 24)
}

fn variant(i: Option<usize>, j: Option<usize>) -> Variant {
    match (i == Some(0), j == Some(0)) {
        (true, true) => Variant::EmptyIJ,
        (true, false) => Variant::EmptyI,
        (false, true) => Variant::EmptyJ,
        _ => Variant::Standard,
    }
}

/// Labels a swap whose input has `outer` above `inner`. The index set `I`
/// belongs to the rule listed first in the rule's display.
fn labels(outer: (u8, Option<usize>), inner: (u8, Option<usize>)) -> Vec<(RuleId, Direction)> {
    let n = number(outer.0, inner.0);
    if outer.0 < inner.0 {
        vec![(RuleId::new(n, variant(outer.1, inner.1)), Direction::Forward)]
    } else if outer.0 > inner.0 {
        vec![(RuleId::new(n, variant(inner.1, outer.1)), Direction::Backward)]
    } else {
        vec![
            (RuleId::new(n, variant(outer.1, inner.1)), Direction::Forward),
            (RuleId::new(n, variant(inner.1, outer.1)), Direction::Backward),
        ]
    }
}

/// Conversions found at one node, plus whether the list is complete (an
/// emitted fork draws its idle arms from a possibly partial proof list).
pub struct Found {
    pub conversions: Vec<Conversion>,
    pub complete: bool,
}

pub fn find_conversions(t: &TypedTerm) -> Vec<Conversion> {
    conversions(t).conversions
}

pub fn conversions(t: &TypedTerm) -> Found {
    let mut out = Found { conversions: Vec::new(), complete: true };
    for p in t.term.paths() {
        let f = conversions_at(t, &p);
        out.complete &= f.complete;
        out.conversions.extend(f.conversions);
    }
    out
}

pub fn conversions_at(t: &TypedTerm, path: &[usize]) -> Found {
    let mut found = Found { conversions: Vec::new(), complete: true };
    let Some(node) = t.term.at(path) else { return found };
    let seq = t.seq_at(path).expect("decorated").clone();
    let push = |repl: Term, outer: (u8, Option<usize>), inner: (u8, Option<usize>), found: &mut Found| {
        for (rule, direction) in labels(outer, inner) {
            found.conversions.push(Conversion { path: path.to_vec(), rule, direction, replacement: repl.clone() });
        }
    };
    match node {
        Term::Case { chan, branches, .. } if branches.is_empty() => {
            for (repl, inner) in emit(chan, &seq, &t.sig, &mut found.complete) {
                push(repl, (0, Some(0)), inner, &mut found);
            }
        }
        _ => {
            for (repl, inner) in swaps(node, &seq) {
                push(repl, (kind(node).expect("rule"), index_len(node)), inner, &mut found);
            }
        }
    }
    if cfg!(debug_assertions) {
        for c in &found.conversions {
            let term = t.term.replace_at(path, c.replacement.clone());
            if let Err(e) = t.recheck(&term) {
                panic!("conversion {c} produced an ill-typed term: {e}\n{}", print_term(&term, SyntaxKind::TermCalc));
            }
        }
    }
    found
}

pub fn apply_conversion(t: &TypedTerm, c: &Conversion) -> Result<TypedTerm, ConversionError> {
    let here = conversions_at(t, &c.path);
    if !here.conversions.iter().any(|d| d == c) {
        return Err(ConversionError::NotAConversion(c.to_string()));
    }
    let term = t.term.replace_at(&c.path, c.replacement.clone());
    Ok(t.recheck(&term).expect("conversions preserve typing"))
}

/// Holes of a rule node: the child positions another rule can move out of,
/// with the channels the node binds or keeps there.
fn hole_sets(node: &Term) -> Vec<(Vec<usize>, BTreeSet<Chan>)> {
    match node {
        Term::Case { chan, branches, .. } if !branches.is_empty() => {
            vec![((0..branches.len()).collect(), [chan.clone()].into())]
        }
        Term::Select { chan, .. } => vec![(vec![0], [chan.clone()].into())],
        Term::Split { parts, .. } => vec![(vec![0], parts.iter().cloned().collect())],
        Term::Fork { arms, .. } => arms.iter().enumerate().map(|(k, a)| (vec![k], [a.part.clone()].into())).collect(),
        _ => vec![],
    }
}

/// `node` with the given holes filled.
fn fill(node: &Term, fills: &BTreeMap<usize, Term>) -> Term {
    match node {
        Term::Case { chan, branches, .. } => Term::Case {
            chan: chan.clone(),
            branches: branches.iter().enumerate().map(|(i, (t, b))| (t.clone(), fills.get(&i).cloned().unwrap_or_else(|| b.clone()))).collect(),
            ctx: None,
        },
        Term::Select { chan, tag, .. } => Term::Select { chan: chan.clone(), tag: tag.clone(), body: Box::new(fills[&0].clone()) },
        Term::Split { chan, parts, .. } => Term::Split { chan: chan.clone(), parts: parts.clone(), body: Box::new(fills[&0].clone()) },
        Term::Fork { chan, arms } => Term::Fork {
            chan: chan.clone(),
            arms: arms
                .iter()
                .enumerate()
                .map(|(k, a)| match fills.get(&k) {
                    Some(b) => arm_with(&a.part, b.clone()),
                    None => a.clone(),
                })
                .collect(),
        },
        _ => unreachable!("only rules have holes"),
    }
}

/// An arm whose owned set is read off its body.
fn arm_with(part: &Chan, body: Term) -> Arm {
    let mut owns = body.free_channels().expect("checked bodies are linear");
    owns.remove(part);
    Arm { part: part.clone(), owns, body }
}

fn rename(t: &Term, from: &[Chan], to: &[Chan]) -> Term {
    let m: BTreeMap<Chan, Chan> = from.iter().cloned().zip(to.iter().cloned()).filter(|(a, b)| a != b).collect();
    if m.is_empty() {
        t.clone()
    } else {
        t.rename_free(&m, &BTreeSet::new())
    }
}

/// Moves a rule on another channel that heads every hole of `node` above it.
fn swaps(node: &Term, seq: &Sequent) -> Vec<(Term, (u8, Option<usize>))> {
    let Some(alpha) = node.principal().cloned() else { return vec![] };
    let kids = node.children();
    let mut out = Vec::new();
    let mut used = node.all_names();
    used.extend(seq.channels());
    for (holes, visible) in hole_sets(node) {
        let inner: Vec<&Term> = holes.iter().map(|&i| kids[i]).collect();
        let Some(k) = kind(inner[0]) else { continue };
        let beta = inner[0].principal().expect("rule").clone();
        if beta == alpha || visible.contains(&beta) {
            continue;
        }
        if !inner.iter().all(|t| kind(t) == Some(k) && t.principal() == Some(&beta)) {
            continue;
        }
        let label = (k, index_len(inner[0]));
        match (k, inner[0]) {
            (0, Term::Case { branches: b0, .. }) => {
                let tags: Vec<_> = b0.iter().map(|(t, _)| t.clone()).collect();
                let mut bodies: Vec<BTreeMap<_, Term>> = Vec::new();
                let mut ok = true;
                for t in &inner {
                    let Term::Case { branches, .. } = t else { unreachable!() };
                    let m: BTreeMap<_, _> = branches.iter().cloned().collect();
                    ok &= branches.len() == tags.len() && tags.iter().all(|g| m.contains_key(g));
                    bodies.push(m);
                }
                if !ok {
                    continue;
                }
                if tags.is_empty() {
                    out.push((Term::Case { chan: beta.clone(), branches: vec![], ctx: Some(seq.clone()) }, label));
                    continue;
                }
                let branches = tags
                    .iter()
                    .map(|g| {
                        let fills = holes.iter().zip(&bodies).map(|(&h, m)| (h, m[g].clone())).collect();
                        (g.clone(), fill(node, &fills))
                    })
                    .collect();
                out.push((Term::Case { chan: beta.clone(), branches, ctx: None }, label));
            }
            (1, Term::Select { tag: t0, .. }) => {
                let mut fills = BTreeMap::new();
                let mut ok = true;
                for (&h, t) in holes.iter().zip(&inner) {
                    let Term::Select { tag, body, .. } = t else { unreachable!() };
                    ok &= tag == t0;
                    fills.insert(h, *body.clone());
                }
                if ok {
                    out.push((Term::Select { chan: beta.clone(), tag: t0.clone(), body: Box::new(fill(node, &fills)) }, label));
                }
            }
            (2, Term::Split { parts: p0, .. }) => {
                // fresh names when a part would capture a channel of the node
                let names: Vec<Chan> = p0
                    .iter()
                    .map(|p| {
                        if seq.contains(p) {
                            let n = fresh_primed(p, &used);
                            used.insert(n.clone());
                            n
                        } else {
                            p.clone()
                        }
                    })
                    .collect();
                let mut fills = BTreeMap::new();
                let mut ok = true;
                for (&h, t) in holes.iter().zip(&inner) {
                    let Term::Split { parts, body, .. } = t else { unreachable!() };
                    ok &= parts.len() == names.len();
                    if ok {
                        fills.insert(h, rename(body, parts, &names));
                    }
                }
                if ok {
                    out.push((Term::Split { chan: beta.clone(), parts: names, body: Box::new(fill(node, &fills)) }, label));
                }
            }
            (3, Term::Fork { arms: a0, .. }) => {
                let owner: Vec<usize> = if visible.is_empty() {
                    (0..a0.len()).collect()
                } else {
                    a0.iter().position(|a| visible.iter().all(|v| a.owns.contains(v))).into_iter().collect()
                };
                'arm: for k2 in owner {
                    let part = if seq.contains(&a0[k2].part) || a0[k2].part == alpha {
                        let n = fresh_primed(&a0[k2].part, &used);
                        used.insert(n.clone());
                        n
                    } else {
                        a0[k2].part.clone()
                    };
                    let mut fills = BTreeMap::new();
                    for (&h, t) in holes.iter().zip(&inner) {
                        let Term::Fork { arms, .. } = t else { unreachable!() };
                        if arms.len() != a0.len() {
                            continue 'arm;
                        }
                        for (j, a) in arms.iter().enumerate() {
                            if j != k2 && a != &a0[j] {
                                continue 'arm;
                            }
                        }
                        if !visible.iter().all(|v| arms[k2].owns.contains(v)) {
                            continue 'arm;
                        }
                        fills.insert(h, rename(&arms[k2].body, std::slice::from_ref(&arms[k2].part), std::slice::from_ref(&part)));
                    }
                    let mut arms = a0.clone();
                    arms[k2] = arm_with(&part, fill(node, &fills));
                    out.push((Term::Fork { chan: beta.clone(), arms }, label));
                }
            }
            _ => {}
        }
    }
    out
}

/// A nullary case on `alpha` emits a rule on another channel of its
/// sequent, staying empty underneath.
fn emit(alpha: &Chan, seq: &Sequent, sig: &Signature, complete: &mut bool) -> Vec<(Term, (u8, Option<usize>))> {
    let empty = |s: Sequent| Term::Case { chan: alpha.clone(), branches: vec![], ctx: Some(s) };
    let mut out = Vec::new();
    for (_, beta, _) in seq.iter() {
        if beta == alpha {
            continue;
        }
        let Some(step) = step_for(seq, beta) else { continue };
        match step {
            Step::Case(bs) if bs.is_empty() => {
                out.push((Term::Case { chan: beta.clone(), branches: vec![], ctx: Some(seq.clone()) }, (0, Some(0))));
            }
            Step::Case(bs) => {
                let n = bs.len();
                let branches = bs.into_iter().map(|(t, s)| (t, empty(s))).collect();
                out.push((Term::Case { chan: beta.clone(), branches, ctx: None }, (0, Some(n))));
            }
            Step::Select(bs) => {
                for (t, s) in bs {
                    out.push((Term::Select { chan: beta.clone(), tag: t, body: Box::new(empty(s)) }, (1, None)));
                }
            }
            Step::Split(parts, s) => {
                let n = parts.len();
                out.push((Term::Split { chan: beta.clone(), parts, body: Box::new(empty(s)) }, (2, Some(n))));
            }
            Step::Fork(arms) => {
                if arms.is_empty() {
                    continue;
                }
                let others: Vec<Chan> = seq.channels().into_iter().filter(|c| c != alpha && c != beta).collect();
                let mut prover = Prover::new(sig, ARM_PROOF_BUDGET);
                for k in 0..arms.len() {
                    for bins in assign(&others, arms.len()) {
                        let arm_seq = |j: usize| {
                            let mut keep: BTreeSet<Chan> = bins[j].iter().cloned().collect();
                            if j == k {
                                keep.insert(alpha.clone());
                            }
                            let mut s = seq.restrict(&keep);
                            let (part, side, y) = &arms[j];
                            s.side_mut(*side).insert(part.clone(), y.clone());
                            s
                        };
                        let mut choices: Vec<Vec<Term>> = vec![vec![]];
                        for j in 0..arms.len() {
                            let opts: Vec<Term> = if j == k { vec![empty(arm_seq(j))] } else { prover.proofs(&arm_seq(j)).as_ref().clone() };
                            choices = choices
                                .into_iter()
                                .flat_map(|c| {
                                    opts.iter().map(move |o| {
                                        let mut c = c.clone();
                                        c.push(o.clone());
                                        c
                                    })
                                })
                                .collect();
                        }
                        for bodies in choices {
                            let fork_arms = arms.iter().zip(bodies).map(|((part, _, _), body)| arm_with(part, body)).collect();
                            out.push((Term::Fork { chan: beta.clone(), arms: fork_arms }, (3, Some(arms.len()))));
                        }
                    }
                }
                // idle arms are cut-free proofs only; with axioms they might
                // also be wired composites
                if arms.len() > 1 && (!prover.exhaustive() || !sig.is_empty()) {
                    *complete = false;
                }
            }
        }
    }
    out
}

fn assign(items: &[Chan], n: usize) -> Vec<Vec<Vec<Chan>>> {
    let mut out = vec![vec![Vec::new(); n]];
    for it in items {
        out = out
            .into_iter()
            .flat_map(|bins| {
                (0..n).map(move |b| {
                    let mut bins = bins.clone();
                    bins[b].push(it.clone());
                    bins
                })
            })
            .collect();
    }
    out
}
