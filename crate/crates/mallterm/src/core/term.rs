use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::formula::Formula;
use super::names::{Chan, Tag};
use super::sequent::Sequent;
use super::CoreError;

/// One arm of a fork: the bound part channel, the context channels it owns,
/// and its body.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Arm {
    pub part: Chan,
    pub owns: BTreeSet<Chan>,
    pub body: Term,
}

/// A proof term in term-calculus form.
///
/// `Case` with no branches is the nullary cotuple/tuple and carries its
/// sequent once checked. `Cut` may carry the cut formula; the checker fills it
/// in. Split parts, fork parts and cut channels are binders.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Term {
    Id(Chan, Chan),
    Case { chan: Chan, branches: Vec<(Tag, Term)>, ctx: Option<Sequent> },
    Select { chan: Chan, tag: Tag, body: Box<Term> },
    Split { chan: Chan, parts: Vec<Chan>, body: Box<Term> },
    Fork { chan: Chan, arms: Vec<Arm> },
    Cut { chan: Chan, ty: Option<Formula>, left: Box<Term>, right: Box<Term> },
    Axiom { name: String, ins: Vec<Chan>, outs: Vec<Chan> },
}

/// A sequence of child indices from the root. Case branches and fork arms
/// are numbered in order; a cut's left side is 0 and its right side 1.
pub type Path = Vec<usize>;

impl Term {
    pub fn id(a: &str, b: &str) -> Term {
        Term::Id(a.into(), b.into())
    }

    pub fn cut(chan: &str, left: Term, right: Term) -> Term {
        Term::Cut { chan: chan.into(), ty: None, left: Box::new(left), right: Box::new(right) }
    }

    pub fn axiom(name: &str, ins: &[&str], outs: &[&str]) -> Term {
        Term::Axiom {
            name: name.to_string(),
            ins: ins.iter().map(|c| Chan::from(*c)).collect(),
            outs: outs.iter().map(|c| Chan::from(*c)).collect(),
        }
    }

    pub fn select(chan: &str, tag: &str, body: Term) -> Term {
        Term::Select { chan: chan.into(), tag: tag.into(), body: Box::new(body) }
    }

    pub fn split(chan: &str, parts: &[&str], body: Term) -> Term {
        Term::Split { chan: chan.into(), parts: parts.iter().map(|c| Chan::from(*c)).collect(), body: Box::new(body) }
    }

    pub fn case(chan: &str, branches: Vec<(&str, Term)>) -> Term {
        Term::Case {
            chan: chan.into(),
            branches: branches.into_iter().map(|(t, b)| (Tag::from(t), b)).collect(),
            ctx: None,
        }
    }

    pub fn fork(chan: &str, arms: Vec<(&str, &[&str], Term)>) -> Term {
        Term::Fork {
            chan: chan.into(),
            arms: arms
                .into_iter()
                .map(|(p, owns, body)| Arm {
                    part: p.into(),
                    owns: owns.iter().map(|c| Chan::from(*c)).collect(),
                    body,
                })
                .collect(),
        }
    }

    /// The channel a rule node acts on; `None` for identities, cuts and axioms.
    pub fn principal(&self) -> Option<&Chan> {
        match self {
            Term::Case { chan, .. }
            | Term::Select { chan, .. }
            | Term::Split { chan, .. }
            | Term::Fork { chan, .. } => Some(chan),
            _ => None,
        }
    }

    pub fn is_rule(&self) -> bool {
        self.principal().is_some()
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Id(..) | Term::Axiom { .. } => vec![],
            Term::Case { branches, .. } => branches.iter().map(|(_, b)| b).collect(),
            Term::Select { body, .. } | Term::Split { body, .. } => vec![body],
            Term::Fork { arms, .. } => arms.iter().map(|a| &a.body).collect(),
            Term::Cut { left, right, .. } => vec![left, right],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Term> {
        match self {
            Term::Id(..) | Term::Axiom { .. } => vec![],
            Term::Case { branches, .. } => branches.iter_mut().map(|(_, b)| b).collect(),
            Term::Select { body, .. } | Term::Split { body, .. } => vec![body.as_mut()],
            Term::Fork { arms, .. } => arms.iter_mut().map(|a| &mut a.body).collect(),
            Term::Cut { left, right, .. } => vec![left.as_mut(), right.as_mut()],
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            t = *t.children().get(i)?;
        }
        Some(t)
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Term> {
        let mut t = self;
        for &i in path {
            t = t.children_mut().into_iter().nth(i)?;
        }
        Some(t)
    }

    /// A copy with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Term {
        let mut t = self.clone();
        *t.at_mut(path).expect("valid path") = new;
        t
    }

    /// Every node path in preorder.
    pub fn paths(&self) -> Vec<Path> {
        let mut out = Vec::new();
        fn go(t: &Term, p: &mut Path, out: &mut Vec<Path>) {
            out.push(p.clone());
            for (i, c) in t.children().into_iter().enumerate() {
                p.push(i);
                go(c, p, out);
                p.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn cut_count(&self) -> usize {
        let own = usize::from(matches!(self, Term::Cut { .. }));
        own + self.children().iter().map(|c| c.cut_count()).sum::<usize>()
    }

    pub fn axiom_count(&self) -> usize {
        let own = usize::from(matches!(self, Term::Axiom { .. }));
        own + self.children().iter().map(|c| c.axiom_count()).sum::<usize>()
    }

    /// Channels bound at this node.
    pub fn binders(&self) -> Vec<&Chan> {
        match self {
            Term::Split { parts, .. } => parts.iter().collect(),
            Term::Fork { arms, .. } => arms.iter().map(|a| &a.part).collect(),
            Term::Cut { chan, .. } => vec![chan],
            _ => vec![],
        }
    }

    /// Every channel name mentioned anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<Chan> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<Chan>) {
        match self {
            Term::Id(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Term::Axiom { ins, outs, .. } => out.extend(ins.iter().chain(outs).cloned()),
            Term::Case { chan, ctx, .. } => {
                out.insert(chan.clone());
                if let Some(s) = ctx {
                    out.extend(s.channels());
                }
            }
            Term::Select { chan, .. } => {
                out.insert(chan.clone());
            }
            Term::Split { chan, parts, .. } => {
                out.insert(chan.clone());
                out.extend(parts.iter().cloned());
            }
            Term::Fork { chan, arms } => {
                out.insert(chan.clone());
                for a in arms {
                    out.insert(a.part.clone());
                    out.extend(a.owns.iter().cloned());
                }
            }
            Term::Cut { chan, .. } => {
                out.insert(chan.clone());
            }
        }
        for c in self.children() {
            c.collect_names(out);
        }
    }

    /// Free channels plus whether the set may be incomplete because a
    /// nullary case without its context annotation sits in tail position.
    pub fn free_info(&self) -> Result<(BTreeSet<Chan>, bool), CoreError> {
        match self {
            Term::Id(a, b) => {
                if a == b {
                    return Err(CoreError::DuplicateInterface(a.clone()));
                }
                Ok(([a.clone(), b.clone()].into(), false))
            }
            Term::Axiom { ins, outs, .. } => {
                let mut s = BTreeSet::new();
                for c in ins.iter().chain(outs) {
                    if !s.insert(c.clone()) {
                        return Err(CoreError::DuplicateInterface(c.clone()));
                    }
                }
                Ok((s, false))
            }
            Term::Case { chan, branches, ctx } if branches.is_empty() => match ctx {
                Some(s) => {
                    let mut set = s.channels();
                    set.insert(chan.clone());
                    Ok((set, false))
                }
                None => Ok(([chan.clone()].into(), true)),
            },
            Term::Case { chan, branches, .. } => {
                let mut set = BTreeSet::new();
                let mut open = true;
                for (_, b) in branches {
                    let (f, o) = b.free_info()?;
                    set.extend(f);
                    open &= o;
                }
                set.insert(chan.clone());
                Ok((set, open))
            }
            Term::Select { chan, body, .. } => {
                let (mut f, o) = body.free_info()?;
                f.insert(chan.clone());
                Ok((f, o))
            }
            Term::Split { chan, parts, body } => {
                let (mut f, o) = body.free_info()?;
                if f.contains(chan) {
                    return Err(CoreError::DuplicateInterface(chan.clone()));
                }
                let mut seen = BTreeSet::new();
                for p in parts {
                    if !seen.insert(p) {
                        return Err(CoreError::DuplicateInterface(p.clone()));
                    }
                    f.remove(p);
                }
                f.insert(chan.clone());
                Ok((f, o))
            }
            Term::Fork { chan, arms } => {
                let mut set = BTreeSet::new();
                for a in arms {
                    let (mut f, _) = a.body.free_info()?;
                    if f.contains(chan) {
                        return Err(CoreError::DuplicateInterface(chan.clone()));
                    }
                    f.remove(&a.part);
                    f.extend(a.owns.iter().cloned());
                    for c in f {
                        if !set.insert(c.clone()) {
                            return Err(CoreError::DuplicateInterface(c));
                        }
                    }
                }
                if set.contains(chan) {
                    return Err(CoreError::DuplicateInterface(chan.clone()));
                }
                set.insert(chan.clone());
                Ok((set, false))
            }
            Term::Cut { chan, left, right, .. } => {
                let (l, lo) = left.free_info()?;
                let (r, ro) = right.free_info()?;
                if let Some(c) = l.intersection(&r).find(|c| *c != chan) {
                    return Err(CoreError::DuplicateInterface(c.clone()));
                }
                let mut set: BTreeSet<Chan> = l.union(&r).cloned().collect();
                set.remove(chan);
                Ok((set, lo || ro))
            }
        }
    }

    /// The interface channels of the term.
    pub fn free_channels(&self) -> Result<BTreeSet<Chan>, CoreError> {
        self.free_info().map(|(s, _)| s)
    }

    /// Structure-preserving rename of every occurrence, bound or free.
    pub fn rename_channels(&self, m: &BTreeMap<Chan, Chan>) -> Result<Term, CoreError> {
        let names = self.all_names();
        let mut image = BTreeSet::new();
        for c in &names {
            let d = m.get(c).unwrap_or(c);
            if !image.insert(d.clone()) {
                return Err(CoreError::NonInjectiveRename(d.clone()));
            }
        }
        Ok(self.map_all(&|c| m.get(c).cloned().unwrap_or_else(|| c.clone())))
    }

    fn map_all(&self, f: &dyn Fn(&Chan) -> Chan) -> Term {
        match self {
            Term::Id(a, b) => Term::Id(f(a), f(b)),
            Term::Axiom { name, ins, outs } => Term::Axiom {
                name: name.clone(),
                ins: ins.iter().map(f).collect(),
                outs: outs.iter().map(f).collect(),
            },
            Term::Case { chan, branches, ctx } => Term::Case {
                chan: f(chan),
                branches: branches.iter().map(|(t, b)| (t.clone(), b.map_all(f))).collect(),
                ctx: ctx.as_ref().map(|s| s.rename(f)),
            },
            Term::Select { chan, tag, body } => {
                Term::Select { chan: f(chan), tag: tag.clone(), body: Box::new(body.map_all(f)) }
            }
            Term::Split { chan, parts, body } => Term::Split {
                chan: f(chan),
                parts: parts.iter().map(f).collect(),
                body: Box::new(body.map_all(f)),
            },
            Term::Fork { chan, arms } => Term::Fork {
                chan: f(chan),
                arms: arms
                    .iter()
                    .map(|a| Arm { part: f(&a.part), owns: a.owns.iter().map(f).collect(), body: a.body.map_all(f) })
                    .collect(),
            },
            Term::Cut { chan, ty, left, right } => Term::Cut {
                chan: f(chan),
                ty: ty.clone(),
                left: Box::new(left.map_all(f)),
                right: Box::new(right.map_all(f)),
            },
        }
    }

    /// Renames free occurrences through `m`, renaming any binder that would
    /// capture a target name. Fresh binder names avoid `avoid` and every name
    /// already in the term.
    pub fn rename_free(&self, m: &BTreeMap<Chan, Chan>, avoid: &BTreeSet<Chan>) -> Term {
        let mut used: BTreeSet<Chan> = self.all_names();
        used.extend(avoid.iter().cloned());
        used.extend(m.keys().cloned());
        used.extend(m.values().cloned());
        self.subst(m, &mut used)
    }

    fn subst(&self, m: &BTreeMap<Chan, Chan>, used: &mut BTreeSet<Chan>) -> Term {
        let g = |c: &Chan| m.get(c).cloned().unwrap_or_else(|| c.clone());
        // binder handling: shadowed names drop out, captured targets get fresh names
        let enter = |binders: &[Chan], used: &mut BTreeSet<Chan>| -> (BTreeMap<Chan, Chan>, Vec<Chan>) {
            let mut inner = m.clone();
            let targets: BTreeSet<Chan> = m.values().cloned().collect();
            let mut renamed = Vec::new();
            for b in binders {
                inner.remove(b);
                if targets.contains(b) {
                    let nb = super::names::fresh_primed(b, used);
                    used.insert(nb.clone());
                    inner.insert(b.clone(), nb.clone());
                    renamed.push(nb);
                } else {
                    renamed.push(b.clone());
                }
            }
            (inner, renamed)
        };
        match self {
            Term::Id(a, b) => Term::Id(g(a), g(b)),
            Term::Axiom { name, ins, outs } => Term::Axiom {
                name: name.clone(),
                ins: ins.iter().map(g).collect(),
                outs: outs.iter().map(g).collect(),
            },
            Term::Case { chan, branches, ctx } => Term::Case {
                chan: g(chan),
                branches: branches.iter().map(|(t, b)| (t.clone(), b.subst(m, used))).collect(),
                ctx: ctx.as_ref().map(|s| s.rename(g)),
            },
            Term::Select { chan, tag, body } => {
                Term::Select { chan: g(chan), tag: tag.clone(), body: Box::new(body.subst(m, used)) }
            }
            Term::Split { chan, parts, body } => {
                let (inner, parts) = enter(parts, used);
                Term::Split { chan: g(chan), parts, body: Box::new(body.subst(&inner, used)) }
            }
            Term::Fork { chan, arms } => Term::Fork {
                chan: g(chan),
                arms: arms
                    .iter()
                    .map(|a| {
                        let (inner, parts) = enter(std::slice::from_ref(&a.part), used);
                        Arm {
                            part: parts[0].clone(),
                            owns: a.owns.iter().map(g).collect(),
                            body: a.body.subst(&inner, used),
                        }
                    })
                    .collect(),
            },
            Term::Cut { chan, ty, left, right } => {
                let (inner, parts) = enter(std::slice::from_ref(chan), used);
                Term::Cut {
                    chan: parts[0].clone(),
                    ty: ty.clone(),
                    left: Box::new(left.subst(&inner, used)),
                    right: Box::new(right.subst(&inner, used)),
                }
            }
        }
    }

    /// Renames bound channels to `c1`, `c2`, ... in preorder, skipping names
    /// free in the term. Free channels are untouched.
    pub fn canonicalize(&self) -> Term {
        let avoid = self.free_channels().unwrap_or_default();
        let mut counter = 0usize;
        self.canon(&BTreeMap::new(), &mut counter, &avoid)
    }

    fn canon(&self, scope: &BTreeMap<Chan, Chan>, counter: &mut usize, avoid: &BTreeSet<Chan>) -> Term {
        let g = |c: &Chan| scope.get(c).cloned().unwrap_or_else(|| c.clone());
        let next = |counter: &mut usize| loop {
            *counter += 1;
            let c = Chan::from(format!("c{counter}").as_str());
            if !avoid.contains(&c) {
                return c;
            }
        };
        match self {
            Term::Id(a, b) => Term::Id(g(a), g(b)),
            Term::Axiom { name, ins, outs } => Term::Axiom {
                name: name.clone(),
                ins: ins.iter().map(g).collect(),
                outs: outs.iter().map(g).collect(),
            },
            Term::Case { chan, branches, ctx } => Term::Case {
                chan: g(chan),
                branches: branches.iter().map(|(t, b)| (t.clone(), b.canon(scope, counter, avoid))).collect(),
                ctx: ctx.as_ref().map(|s| s.rename(g)),
            },
            Term::Select { chan, tag, body } => Term::Select {
                chan: g(chan),
                tag: tag.clone(),
                body: Box::new(body.canon(scope, counter, avoid)),
            },
            Term::Split { chan, parts, body } => {
                let mut inner = scope.clone();
                let parts: Vec<Chan> = parts
                    .iter()
                    .map(|p| {
                        let n = next(counter);
                        inner.insert(p.clone(), n.clone());
                        n
                    })
                    .collect();
                Term::Split { chan: g(chan), parts, body: Box::new(body.canon(&inner, counter, avoid)) }
            }
            Term::Fork { chan, arms } => {
                let chan = g(chan);
                let arms = arms
                    .iter()
                    .map(|a| {
                        let mut inner = scope.clone();
                        let n = next(counter);
                        inner.insert(a.part.clone(), n.clone());
                        Arm { part: n, owns: a.owns.iter().map(g).collect(), body: a.body.canon(&inner, counter, avoid) }
                    })
                    .collect();
                Term::Fork { chan, arms }
            }
            Term::Cut { chan, ty, left, right } => {
                let mut inner = scope.clone();
                let n = next(counter);
                inner.insert(chan.clone(), n.clone());
                Term::Cut {
                    chan: n,
                    ty: ty.clone(),
                    left: Box::new(left.canon(&inner, counter, avoid)),
                    right: Box::new(right.canon(&inner, counter, avoid)),
                }
            }
        }
    }

    /// Drops cut-formula and nullary-context annotations everywhere.
    pub fn erase_annotations(&self) -> Term {
        let mut t = self.clone();
        t.erase_in_place();
        t
    }

    fn erase_in_place(&mut self) {
        match self {
            Term::Case { ctx, .. } => *ctx = None,
            Term::Cut { ty, .. } => *ty = None,
            _ => {}
        }
        for c in self.children_mut() {
            c.erase_in_place();
        }
    }
}
