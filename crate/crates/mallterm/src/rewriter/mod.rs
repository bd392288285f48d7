//! Cut-elimination reductions (1)-(14), their nullary forms, redex search
//! and leftmost-innermost normalization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::checker::{TypeError, TypedTerm};
use crate::core::{fresh_primed, Arm, Chan, Formula, Path, Term};
use crate::measure::{cut_bag, CutBag};

/// Which shape of a numbered rule fired. Reductions use the first four;
/// conversions use `Standard` and the `Empty*` classes, which say which
/// index set (outer rule `I`, inner rule `J`) is empty.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Standard,
    NullaryCotuple,
    NullarySplit,
    NullaryFork,
    EmptyI,
    EmptyJ,
    EmptyIJ,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize)]
pub struct RuleId {
    pub number: u8,
    pub variant: Variant,
}

impl RuleId {
    pub fn new(number: u8, variant: Variant) -> RuleId {
        RuleId { number, variant }
    }

    pub fn standard(number: u8) -> RuleId {
        RuleId { number, variant: Variant::Standard }
    }

    pub fn is_reduction(&self) -> bool {
        self.number <= 14
    }

    pub fn is_nullary(&self) -> bool {
        self.variant != Variant::Standard
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.variant {
            Variant::Standard => return write!(f, "({})", self.number),
            Variant::NullaryCotuple => "empty case",
            Variant::NullarySplit => "empty split",
            Variant::NullaryFork => "empty fork",
            Variant::EmptyI => "I empty",
            Variant::EmptyJ => "J empty",
            Variant::EmptyIJ => "I, J empty",
        };
        write!(f, "({}; {v})", self.number)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Redex {
    pub path: Path,
    pub rule: RuleId,
}

#[derive(Clone, Debug)]
pub struct Step {
    pub redex: Redex,
    pub result: TypedTerm,
    pub bag_before: CutBag,
    pub bag_after: CutBag,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub initial: TypedTerm,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, Error)]
pub enum RewriteError {
    #[error("no {rule} redex at {path:?}")]
    NotARedex { path: Path, rule: RuleId },
    #[error("no normal form within {0} steps")]
    StepBudgetExceeded(usize),
    #[error("rewrite produced an ill-typed term: {0}")]
    IllTyped(TypeError),
}

/// The reductions that match the cut at `path`, by rule number.
pub fn rules_at(t: &Term, path: &[usize]) -> Vec<RuleId> {
    let Some(Term::Cut { chan, left, right, .. }) = t.at(path) else { return vec![] };
    let mut out = Vec::new();
    let g = chan;
    let is_id_on = |s: &Term| matches!(s, Term::Id(a, b) if a == g || b == g);
    if is_id_on(right) {
        out.push(RuleId::standard(1));
    }
    if is_id_on(left) {
        out.push(RuleId::standard(2));
    }
    // commuting a rule on another channel past the cut
    let commute = |s: &Term, odd: u8| -> Option<RuleId> {
        let n = |k: u8| k + odd;
        match s {
            Term::Case { chan: a, branches, .. } if a != g => Some(if branches.is_empty() {
                RuleId::new(n(3), Variant::NullaryCotuple)
            } else {
                RuleId::standard(n(3))
            }),
            Term::Select { chan: a, .. } if a != g => Some(RuleId::standard(n(5))),
            Term::Split { chan: a, parts, .. } if a != g => Some(if parts.is_empty() {
                RuleId::new(n(7), Variant::NullarySplit)
            } else {
                RuleId::standard(n(7))
            }),
            Term::Fork { chan: a, arms } if a != g && arms.iter().any(|arm| arm.owns.contains(g)) => {
                Some(RuleId::standard(n(9)))
            }
            _ => None,
        }
    };
    out.extend(commute(left, 0));
    out.extend(commute(right, 1));
    let on_g = |s: &Term| s.principal() == Some(g);
    if on_g(left) && on_g(right) {
        match (left.as_ref(), right.as_ref()) {
            (Term::Select { .. }, Term::Case { .. }) => out.push(RuleId::standard(11)),
            (Term::Case { .. }, Term::Select { .. }) => out.push(RuleId::standard(12)),
            (Term::Fork { arms, .. }, Term::Split { .. }) => out.push(if arms.is_empty() {
                RuleId::new(13, Variant::NullaryFork)
            } else {
                RuleId::standard(13)
            }),
            (Term::Split { .. }, Term::Fork { arms, .. }) => out.push(if arms.is_empty() {
                RuleId::new(14, Variant::NullaryFork)
            } else {
                RuleId::standard(14)
            }),
            _ => {}
        }
    }
    out.sort();
    out
}

/// Every redex, in preorder of position and then by rule number.
pub fn find_redexes(t: &TypedTerm) -> Vec<Redex> {
    let mut out = Vec::new();
    for p in t.term.paths() {
        for rule in rules_at(&t.term, &p) {
            out.push(Redex { path: p.clone(), rule });
        }
    }
    out
}

/// The leftmost-innermost redex: first cut in postorder that has one, then
/// the lowest rule number there.
pub fn choose_redex(t: &Term) -> Option<Redex> {
    fn go(t: &Term, path: &mut Path, root: &Term) -> Option<Redex> {
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            let r = go(c, path, root);
            path.pop();
            if r.is_some() {
                return r;
            }
        }
        rules_at(root, path).into_iter().next().map(|rule| Redex { path: path.clone(), rule })
    }
    go(t, &mut Vec::new(), t)
}

pub fn apply(t: &TypedTerm, r: &Redex) -> Result<TypedTerm, RewriteError> {
    let new = rewrite(t, r)?;
    let term = t.term.replace_at(&r.path, new);
    t.recheck(&term).map_err(RewriteError::IllTyped)
}

/// The replacement for the cut at `r.path`.
pub fn rewrite(t: &TypedTerm, r: &Redex) -> Result<Term, RewriteError> {
    let not = || RewriteError::NotARedex { path: r.path.clone(), rule: r.rule };
    if !rules_at(&t.term, &r.path).contains(&r.rule) {
        return Err(not());
    }
    let Some(Term::Cut { chan: g, ty, left, right }) = t.term.at(&r.path) else { return Err(not()) };
    let z = ty.clone().expect("checked cuts carry their formula");
    let outer = t.seq_at(&r.path).expect("decorated").clone();
    let mut right_path = r.path.clone();
    right_path.push(1);
    let mut left_path = r.path.clone();
    left_path.push(0);
    let free_right: BTreeSet<Chan> = t.seq_at(&right_path).expect("decorated").channels();
    let free_left: BTreeSet<Chan> = t.seq_at(&left_path).expect("decorated").channels();
    let mut used = t.term.all_names();
    used.extend(outer.channels());
    let cut = |l: Term, r: Term| Term::Cut { chan: g.clone(), ty: Some(z.clone()), left: Box::new(l), right: Box::new(r) };
    // the rule on the side being commuted, with the other side and a builder
    let (side, other, other_free, build): (&Term, &Term, &BTreeSet<Chan>, &dyn Fn(Term, Term) -> Term) =
        if r.rule.number % 2 == 1 {
            (left, right, &free_right, &|s: Term, o: Term| cut(s, o))
        } else {
            (right, left, &free_left, &|s: Term, o: Term| cut(o, s))
        };
    let out = match r.rule.number {
        1 | 2 => {
            let (keep, id) = if r.rule.number == 1 { (left, right) } else { (right, left) };
            let Term::Id(a, b) = id.as_ref() else { return Err(not()) };
            let to = if a == g { b } else { a };
            keep.rename_free(&[(g.clone(), to.clone())].into(), &BTreeSet::new())
        }
        3 | 4 => match side {
            Term::Case { chan, branches, .. } if branches.is_empty() => {
                Term::Case { chan: chan.clone(), branches: vec![], ctx: Some(outer) }
            }
            Term::Case { chan, branches, .. } => Term::Case {
                chan: chan.clone(),
                branches: branches.iter().map(|(tag, f)| (tag.clone(), build(f.clone(), other.clone()))).collect(),
                ctx: None,
            },
            _ => return Err(not()),
        },
        5 | 6 => match side {
            Term::Select { chan, tag, body } => {
                Term::Select { chan: chan.clone(), tag: tag.clone(), body: Box::new(build(*body.clone(), other.clone())) }
            }
            _ => return Err(not()),
        },
        7 | 8 => match side {
            Term::Split { chan, parts, body } => {
                let (parts, body) = avoid_binders(parts, body, other_free, &mut used);
                Term::Split { chan: chan.clone(), parts, body: Box::new(build(body, other.clone())) }
            }
            _ => return Err(not()),
        },
        9 | 10 => match side {
            Term::Fork { chan, arms } => {
                let arms = arms
                    .iter()
                    .map(|a| {
                        if !a.owns.contains(g) {
                            return a.clone();
                        }
                        let (parts, body) = avoid_binders(std::slice::from_ref(&a.part), &a.body, other_free, &mut used);
                        let mut owns = a.owns.clone();
                        owns.extend(other_free.iter().cloned());
                        owns.remove(g);
                        Arm { part: parts[0].clone(), owns, body: build(body, other.clone()) }
                    })
                    .collect();
                Term::Fork { chan: chan.clone(), arms }
            }
            _ => return Err(not()),
        },
        11 | 12 => {
            let (sel, case) = if r.rule.number == 11 { (left, right) } else { (right, left) };
            let (Term::Select { tag, body, .. }, Term::Case { branches, .. }) = (sel.as_ref(), case.as_ref()) else {
                return Err(not());
            };
            let gk = &branches.iter().find(|(t, _)| t == tag).ok_or_else(not)?.1;
            let zk = z.component_for_tag(tag).ok_or_else(not)?.clone();
            let (l, r2) = if r.rule.number == 11 { (*body.clone(), gk.clone()) } else { (gk.clone(), *body.clone()) };
            Term::Cut { chan: g.clone(), ty: Some(zk), left: Box::new(l), right: Box::new(r2) }
        }
        13 | 14 => {
            let (fork, split) = if r.rule.number == 13 { (left, right) } else { (right, left) };
            let (Term::Fork { arms, .. }, Term::Split { parts, body, .. }) = (fork.as_ref(), split.as_ref()) else {
                return Err(not());
            };
            let comps: Vec<Formula> = z.components().ok_or_else(not)?.iter().map(|(_, x)| x.clone()).collect();
            let body_free = body.free_channels().unwrap_or_default();
            let mut chosen: Vec<Chan> = Vec::new();
            for (i, a) in arms.iter().enumerate() {
                let clash = (body_free.contains(&a.part) && a.part != parts[i]) || chosen.contains(&a.part);
                let n = if clash { fresh_primed(&a.part, &used) } else { a.part.clone() };
                used.insert(n.clone());
                chosen.push(n);
            }
            let m: BTreeMap<Chan, Chan> = parts.iter().cloned().zip(chosen.iter().cloned()).collect();
            let mut acc = body.rename_free(&m, &BTreeSet::new());
            let fs: Vec<Term> = arms
                .iter()
                .zip(&chosen)
                .map(|(a, n)| {
                    if &a.part == n {
                        a.body.clone()
                    } else {
                        a.body.rename_free(&[(a.part.clone(), n.clone())].into(), &BTreeSet::new())
                    }
                })
                .collect();
            let mk = |n: &Chan, x: &Formula, l: Term, r: Term| Term::Cut {
                chan: n.clone(),
                ty: Some(x.clone()),
                left: Box::new(l),
                right: Box::new(r),
            };
            if r.rule.number == 13 {
                for i in 0..fs.len() {
                    acc = mk(&chosen[i], &comps[i], fs[i].clone(), acc);
                }
            } else {
                for i in (0..fs.len()).rev() {
                    acc = mk(&chosen[i], &comps[i], acc, fs[i].clone());
                }
            }
            acc
        }
        _ => return Err(not()),
    };
    Ok(out)
}

/// Renames binders that would capture a free channel of the term moving
/// under them.
fn avoid_binders(parts: &[Chan], body: &Term, free: &BTreeSet<Chan>, used: &mut BTreeSet<Chan>) -> (Vec<Chan>, Term) {
    let mut m = BTreeMap::new();
    let parts = parts
        .iter()
        .map(|p| {
            if free.contains(p) {
                let n = fresh_primed(p, used);
                used.insert(n.clone());
                m.insert(p.clone(), n.clone());
                n
            } else {
                p.clone()
            }
        })
        .collect();
    let body = if m.is_empty() { body.clone() } else { body.rename_free(&m, used) };
    (parts, body)
}

/// Rewrites with the leftmost-innermost strategy until no redex is left.
pub fn normalize(t: &TypedTerm, max_steps: usize) -> Result<(TypedTerm, Trace), RewriteError> {
    let mut cur = t.clone();
    let mut steps = Vec::new();
    while let Some(redex) = choose_redex(&cur.term) {
        if steps.len() >= max_steps {
            return Err(RewriteError::StepBudgetExceeded(max_steps));
        }
        let next = apply(&cur, &redex)?;
        steps.push(Step { redex, bag_before: cut_bag(&cur.term), bag_after: cut_bag(&next.term), result: next.clone() });
        cur = next;
    }
    Ok((cur, Trace { initial: t.clone(), steps }))
}

/// Normal form only, without recording the trace.
pub fn normal_form(t: &TypedTerm, max_steps: usize) -> Result<TypedTerm, RewriteError> {
    let mut cur = t.clone();
    let mut n = 0;
    while let Some(redex) = choose_redex(&cur.term) {
        if n >= max_steps {
            return Err(RewriteError::StepBudgetExceeded(max_steps));
        }
        cur = apply(&cur, &redex)?;
        n += 1;
    }
    Ok(cur)
}

/// True when every cut left in `t` is wired to an axiom port: following cuts
/// down one side reaches an axiom that uses the cut channel.
pub fn residual_cuts_touch_axioms(t: &Term) -> bool {
    fn reaches_axiom(s: &Term, c: &Chan) -> bool {
        match s {
            Term::Axiom { ins, outs, .. } => ins.contains(c) || outs.contains(c),
            Term::Cut { left, right, .. } => {
                let inl = left.free_channels().map(|f| f.contains(c)).unwrap_or(false);
                reaches_axiom(if inl { left } else { right }, c)
            }
            _ => false,
        }
    }
    t.paths().iter().all(|p| match t.at(p) {
        Some(Term::Cut { chan, left, right, .. }) => reaches_axiom(left, chan) || reaches_axiom(right, chan),
        _ => true,
    })
}

#[derive(Serialize)]
struct StepJson {
    step: usize,
    path: Path,
    rule: String,
    bag_before: String,
    bag_after: String,
}

impl Trace {
    pub fn final_term(&self) -> &TypedTerm {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.initial)
    }

    /// Machine-readable form: the steps plus both end terms.
    pub fn to_json(&self) -> serde_json::Value {
        let steps: Vec<StepJson> = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| StepJson {
                step: i + 1,
                path: s.redex.path.clone(),
                rule: s.redex.rule.to_string(),
                bag_before: s.bag_before.to_string(),
                bag_after: s.bag_after.to_string(),
            })
            .collect();
        serde_json::json!({
            "initial": self.initial.print(crate::surface::SyntaxKind::TermCalc),
            "final": self.final_term().print(crate::surface::SyntaxKind::TermCalc),
            "steps": steps,
        })
    }
}

#[cfg(test)]
mod tests;
