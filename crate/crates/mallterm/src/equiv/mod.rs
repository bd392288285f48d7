//! Proof equivalence: the permuting conversions, conversion classes of
//! normal forms, and the decision procedure.

mod convert;
mod key;

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::checker::TypedTerm;
use crate::core::{Chan, Sequent, Term};
use crate::rewriter::{choose_redex, normal_form, RewriteError};
use crate::surface::{print_term, SyntaxKind};

pub use convert::{apply_conversion, conversions, conversions_at, find_conversions, is_symmetric, Conversion, ConversionError, Direction, Found};
pub use key::{class_key, representative};

pub const DEFAULT_BUDGET: usize = 100_000;

/// Step cap when normalizing inside `decide`; termination is guaranteed, so
/// hitting it means a bug.
const NORMALIZE_STEPS: usize = 1_000_000;

#[derive(Clone, Debug, Error)]
pub enum DecideError {
    #[error("the terms have different sequents: {0} and {1}")]
    SequentMismatch(String, String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// One link of a chain. `conversion` is `None` when the two ends differ only
/// in how a block of axiom cuts is bracketed.
#[derive(Clone, Debug, Serialize)]
pub struct ChainStep {
    pub conversion: Option<Conversion>,
    #[serde(serialize_with = "as_text")]
    pub term: Term,
}

fn as_text<S: serde::Serializer>(t: &Term, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&print_term(t, SyntaxKind::TermCalc))
}

/// Conversions leading from one normal form to the other. Terms are
/// representatives.
#[derive(Clone, Debug, Serialize)]
pub struct Chain {
    #[serde(serialize_with = "as_text")]
    pub start: Term,
    pub steps: Vec<ChainStep>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum EquivCertificate {
    Equivalent(Chain),
    /// Least printed members of the two classes.
    Inequivalent {
        #[serde(serialize_with = "as_text")]
        left: Term,
        #[serde(serialize_with = "as_text")]
        right: Term,
    },
    Inconclusive { explored: usize, reason: String },
}

impl EquivCertificate {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivCertificate::Equivalent(_))
    }

    pub fn is_inequivalent(&self) -> bool {
        matches!(self, EquivCertificate::Inequivalent { .. })
    }
}

impl Chain {
    pub fn end(&self) -> &Term {
        self.steps.last().map(|s| &s.term).unwrap_or(&self.start)
    }

    /// Replays every step against `like`'s sequent and signature.
    pub fn replay(&self, like: &TypedTerm) -> bool {
        let Ok(mut cur) = like.recheck(&self.start) else { return false };
        for s in &self.steps {
            match &s.conversion {
                Some(c) => {
                    let Ok(next) = apply_conversion(&cur, c) else { return false };
                    if representative(&next) != s.term {
                        return false;
                    }
                }
                None => {
                    if class_key(&cur.term) != class_key(&s.term) {
                        return false;
                    }
                }
            }
            let Ok(next) = like.recheck(&s.term) else { return false };
            cur = next;
        }
        true
    }

    /// The same chain walked backwards.
    pub fn reversed(&self, like: &TypedTerm) -> Option<Chain> {
        let mut terms = vec![self.start.clone()];
        terms.extend(self.steps.iter().map(|s| s.term.clone()));
        let mut steps = Vec::new();
        for i in (1..terms.len()).rev() {
            let from = like.recheck(&terms[i]).ok()?;
            let conversion = match &self.steps[i - 1].conversion {
                None => None,
                Some(_) => Some(step_between(&from, &class_key(&terms[i - 1]))?),
            };
            steps.push(ChainStep { conversion, term: terms[i - 1].clone() });
        }
        Some(Chain { start: terms.last().expect("nonempty").clone(), steps })
    }
}

/// A conversion of `from` landing in the class key `to`.
fn step_between(from: &TypedTerm, to: &str) -> Option<Conversion> {
    for c in conversions(from).conversions {
        let term = from.term.replace_at(&c.path, c.replacement.clone());
        let Ok(t) = from.recheck(&term) else { continue };
        if class_key(&representative(&t)) == to {
            return Some(c);
        }
    }
    None
}

/// A normal form, as a checked representative.
pub fn prepare(t: &TypedTerm) -> Result<TypedTerm, RewriteError> {
    let nf = normal_form(t, NORMALIZE_STEPS)?;
    let rep = representative(&nf);
    Ok(nf.recheck(&rep).expect("representatives re-check"))
}

/// One conversion step from `t`, staying among normal forms.
fn neighbours(t: &TypedTerm) -> (Vec<(Conversion, TypedTerm)>, bool) {
    let found = conversions(t);
    let mut complete = found.complete;
    let mut out = Vec::new();
    for c in found.conversions {
        if c.direction == Direction::Backward && is_symmetric(c.rule.number) {
            continue;
        }
        let term = t.term.replace_at(&c.path, c.replacement.clone());
        let typed = t.recheck(&term).expect("conversions preserve typing");
        if choose_redex(&typed.term).is_some() {
            // leaves the normal forms; not followed
            complete = false;
            continue;
        }
        let rep = representative(&typed);
        out.push((c, t.recheck(&rep).expect("representatives re-check")));
    }
    (out, complete)
}

struct Member {
    tt: TypedTerm,
    key: String,
    parent: Option<(usize, Conversion)>,
}

struct Search {
    members: Vec<Member>,
    index: HashMap<String, usize>,
    queue: VecDeque<usize>,
    complete: bool,
}

impl Search {
    fn new(start: TypedTerm) -> Search {
        let key = class_key(&start.term);
        let mut index = HashMap::new();
        index.insert(key.clone(), 0);
        Search { members: vec![Member { tt: start, key, parent: None }], index, queue: VecDeque::from([0]), complete: true }
    }

    fn exhausted(&self) -> bool {
        self.queue.is_empty()
    }

    fn expand(&mut self) -> Vec<usize> {
        let Some(i) = self.queue.pop_front() else { return vec![] };
        let (next, complete) = neighbours(&self.members[i].tt);
        self.complete &= complete;
        let mut fresh = Vec::new();
        for (c, tt) in next {
            let key = class_key(&tt.term);
            if self.index.contains_key(&key) {
                continue;
            }
            let j = self.members.len();
            self.index.insert(key.clone(), j);
            self.members.push(Member { tt, key, parent: Some((i, c)) });
            self.queue.push_back(j);
            fresh.push(j);
        }
        fresh
    }

    /// Steps from the start to member `i`.
    fn path_to(&self, mut i: usize) -> Vec<ChainStep> {
        let mut steps = Vec::new();
        while let Some((p, c)) = &self.members[i].parent {
            steps.push(ChainStep { conversion: Some(c.clone()), term: self.members[i].tt.term.clone() });
            i = *p;
        }
        steps.reverse();
        steps
    }

    fn least_printed(&self) -> Term {
        self.members
            .iter()
            .map(|m| (print_term(&m.tt.term, SyntaxKind::TermCalc), &m.tt.term))
            .min_by(|a, b| a.0.cmp(&b.0))
            .map(|(_, t)| t.clone())
            .expect("nonempty")
    }
}

/// The conversion class of a normal form.
#[derive(Clone, Debug)]
pub struct ClassReport {
    pub members: Vec<Term>,
    /// False when the budget ran out or some emitted fork could not list all
    /// its idle arms.
    pub complete: bool,
}

pub fn equivalence_class(t: &TypedTerm, budget: usize) -> Result<ClassReport, RewriteError> {
    let mut s = Search::new(prepare(t)?);
    while !s.exhausted() && s.members.len() <= budget {
        s.expand();
    }
    let complete = s.exhausted() && s.complete && s.members.len() <= budget;
    Ok(ClassReport { members: s.members.into_iter().map(|m| m.tt.term).collect(), complete })
}

/// Renames `t`'s free channels to `like`'s when the two sequents agree up
/// to names, position by position.
fn align(like: &Sequent, t: &TypedTerm) -> Result<TypedTerm, DecideError> {
    let mismatch = || DecideError::SequentMismatch(like.to_string(), t.seq.to_string());
    if &t.seq == like {
        return Ok(t.clone());
    }
    let same_names = t.seq.len() == like.len()
        && like.iter().all(|(side, c, x)| matches!(t.seq.get(c), Some((s, y)) if s == side && y.same_type(x)));
    if same_names {
        return crate::checker::check_arc(&t.term, like, t.sig.clone()).map_err(|_| mismatch());
    }
    if t.seq.dom.len() != like.dom.len() || t.seq.cod.len() != like.cod.len() {
        return Err(mismatch());
    }
    let mut m = std::collections::BTreeMap::<Chan, Chan>::new();
    for (a, b) in t.seq.dom.iter().zip(&like.dom).chain(t.seq.cod.iter().zip(&like.cod)) {
        if !a.1.same_type(b.1) {
            return Err(mismatch());
        }
        m.insert(a.0.clone(), b.0.clone());
    }
    let term = t.term.rename_free(&m, &Default::default());
    crate::checker::check_arc(&term, like, t.sig.clone()).map_err(|_| mismatch())
}

/// Decides whether two terms of one sequent are equal up to reductions and
/// conversions.
pub fn decide(t1: &TypedTerm, t2: &TypedTerm, budget: usize) -> Result<EquivCertificate, DecideError> {
    let t2 = align(&t1.seq, t2)?;
    let mut sides = [Search::new(prepare(t1)?), Search::new(prepare(&t2)?)];
    let meet = |sides: &[Search; 2], a: usize, b: usize| -> EquivCertificate {
        let mut steps = sides[0].path_to(a);
        let ma = &sides[0].members[a].tt;
        let mb = &sides[1].members[b].tt;
        if ma.term != mb.term {
            steps.push(ChainStep { conversion: None, term: mb.term.clone() });
        }
        let back = Chain { start: sides[1].members[0].tt.term.clone(), steps: sides[1].path_to(b) };
        let back = back.reversed(mb).expect("conversions are symmetric");
        steps.extend(back.steps);
        EquivCertificate::Equivalent(Chain { start: sides[0].members[0].tt.term.clone(), steps })
    };
    if sides[0].members[0].key == sides[1].members[0].key {
        return Ok(meet(&sides, 0, 0));
    }
    loop {
        for s in 0..2 {
            if sides[s].exhausted() && sides[s].complete {
                return Ok(EquivCertificate::Inequivalent { left: sides[0].least_printed(), right: sides[1].least_printed() });
            }
        }
        let explored = sides[0].members.len() + sides[1].members.len();
        if sides[0].exhausted() && sides[1].exhausted() {
            return Ok(EquivCertificate::Inconclusive { explored, reason: "conversion classes could not be listed completely".into() });
        }
        if explored > budget {
            return Ok(EquivCertificate::Inconclusive { explored, reason: format!("more than {budget} class members") });
        }
        let s = if sides[1].exhausted() || (!sides[0].exhausted() && sides[0].members.len() <= sides[1].members.len()) { 0 } else { 1 };
        for i in sides[s].expand() {
            let key = sides[s].members[i].key.clone();
            if let Some(&j) = sides[1 - s].index.get(&key) {
                let (a, b) = if s == 0 { (i, j) } else { (j, i) };
                return Ok(meet(&sides, a, b));
            }
        }
    }
}

#[cfg(test)]
mod tests;
