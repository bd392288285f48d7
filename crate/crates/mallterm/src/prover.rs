//! Exhaustive enumeration: formulas and sequents by size, cut-free proofs
//! of a sequent, and all terms with cuts up to a total cut-formula size.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::core::{fresh_primed, Arm, Chan, Formula, Sequent, Side, Signature, Tag, Term};

const TAGS: [&str; 4] = ["a", "b", "c", "d"];

/// All formulas of exactly `size` subformula occurrences over `atoms`,
/// with at most `width` components per connective. Labels are placeholders;
/// relabel before putting them in a sequent.
pub fn formulas_of_size(size: usize, atoms: &[&str], width: usize) -> Vec<Formula> {
    let mut memo: HashMap<usize, Rc<Vec<Formula>>> = HashMap::new();
    formulas_rec(size, atoms, width, &mut memo).as_ref().clone()
}

fn formulas_rec(size: usize, atoms: &[&str], width: usize, memo: &mut HashMap<usize, Rc<Vec<Formula>>>) -> Rc<Vec<Formula>> {
    if let Some(v) = memo.get(&size) {
        return v.clone();
    }
    let mut out = Vec::new();
    if size == 1 {
        out.extend(atoms.iter().map(|a| Formula::atom(a)));
        out.extend([Formula::zero(), Formula::one(), Formula::top(), Formula::bot()]);
    } else if size > 1 {
        for k in 1..=width.min(size - 1) {
            for sizes in compositions(size - 1, k) {
                let mut lists: Vec<Vec<Formula>> = vec![vec![]];
                for &s in &sizes {
                    let opts = formulas_rec(s, atoms, width, memo);
                    lists = lists
                        .into_iter()
                        .flat_map(|l| {
                            opts.iter().map(move |x| {
                                let mut l = l.clone();
                                l.push(x.clone());
                                l
                            })
                        })
                        .collect();
                }
                for l in lists {
                    let tagged = || l.iter().enumerate().map(|(i, x)| (Tag::from(TAGS[i]), x.clone())).collect::<Vec<_>>();
                    let chans = || l.iter().enumerate().map(|(i, x)| (Chan::from(format!("p{i}").as_str()), x.clone())).collect::<Vec<_>>();
                    out.push(Formula::Sum(tagged()));
                    out.push(Formula::Prod(tagged()));
                    out.push(Formula::Tensor(chans()));
                    out.push(Formula::Par(chans()));
                }
            }
        }
    }
    let v = Rc::new(out);
    memo.insert(size, v.clone());
    v
}

/// Ordered ways of writing `n` as `k` positive parts.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(k - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Ordered ways of writing `n` as `k` non-negative parts.
fn weak_compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in weak_compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every sequent with total size between 1 and `max` (channels `a1..` in the
/// domain, `b1..` in the codomain), one per arrangement up to reordering
/// each side.
pub fn sequents_up_to(max: usize, atoms: &[&str], width: usize) -> Vec<Sequent> {
    let by_size: Vec<Vec<Formula>> = (0..=max).map(|s| formulas_of_size(s, atoms, width)).collect();
    // multisets of formulas of total size n, as non-decreasing index lists
    let mut pool: Vec<(usize, Formula)> = Vec::new();
    for (s, xs) in by_size.iter().enumerate() {
        for x in xs {
            pool.push((s, x.clone()));
        }
    }
    fn multisets(pool: &[(usize, Formula)], start: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<(usize, Vec<usize>)>) {
        let used: usize = cur.iter().map(|&i| pool[i].0).sum();
        out.push((used, cur.clone()));
        for i in start..pool.len() {
            if used + pool[i].0 <= budget {
                cur.push(i);
                multisets(pool, i, budget, cur, out);
                cur.pop();
            }
        }
    }
    let mut sides = Vec::new();
    multisets(&pool, 0, max, &mut Vec::new(), &mut sides);
    let mut out = Vec::new();
    for (ds, d) in &sides {
        for (cs, c) in &sides {
            if ds + cs == 0 || ds + cs > max {
                continue;
            }
            let mut taken = BTreeSet::new();
            let mut mk = |prefix: &str, idx: &[usize]| -> Vec<(Chan, Formula)> {
                idx.iter()
                    .enumerate()
                    .map(|(k, &i)| {
                        let c = Chan::from(format!("{prefix}{}", k + 1).as_str());
                        taken.insert(c.clone());
                        (c, pool[i].1.clone())
                    })
                    .collect()
            };
            let dom = mk("a", d);
            let cod = mk("b", c);
            let relabel = |v: Vec<(Chan, Formula)>, taken: &mut BTreeSet<Chan>| {
                v.into_iter().map(|(c, x)| {
                    let y = x.relabel(&c, taken);
                    (c, y)
                }).collect::<Vec<_>>()
            };
            let dom = relabel(dom, &mut taken);
            let cod = relabel(cod, &mut taken);
            out.push(Sequent::new(dom, cod).expect("fresh labels"));
        }
    }
    out
}

/// Names usable as new top-level channels of `s`: neither top-level nor
/// nested anywhere in it.
pub(crate) fn names_in(s: &Sequent) -> BTreeSet<Chan> {
    let mut used = s.channels();
    for (_, _, x) in s.iter() {
        used.extend(x.nested_channels());
    }
    used
}

fn pick(base: &Chan, used: &mut BTreeSet<Chan>) -> Chan {
    let c = if used.contains(base) { fresh_primed(base, used) } else { base.clone() };
    used.insert(c.clone());
    c
}

/// The sequents one rule step up from `s` on channel `c`, if `c` carries a
/// connective. Used by both enumerators.
pub(crate) enum Step {
    Case(Vec<(Tag, Sequent)>),
    Select(Vec<(Tag, Sequent)>),
    Split(Vec<Chan>, Sequent),
    Fork(Vec<(Chan, Side, Formula)>),
}

pub(crate) fn step_for(s: &Sequent, c: &Chan) -> Option<Step> {
    let (side, x) = s.get(c)?;
    let x = x.clone();
    let with = |y: &Formula| {
        let mut t = s.clone();
        t.replace(c, y.clone());
        t
    };
    match (&x, side) {
        (Formula::Atom(_), _) => None,
        (Formula::Sum(ps), Side::Dom) | (Formula::Prod(ps), Side::Cod) => {
            Some(Step::Case(ps.iter().map(|(t, y)| (t.clone(), with(y))).collect()))
        }
        (Formula::Prod(ps), Side::Dom) | (Formula::Sum(ps), Side::Cod) => {
            Some(Step::Select(ps.iter().map(|(t, y)| (t.clone(), with(y))).collect()))
        }
        (Formula::Tensor(ps), Side::Dom) | (Formula::Par(ps), Side::Cod) => {
            let mut used = names_in(s);
            used.remove(c);
            ps.iter().for_each(|(l, _)| {
                used.remove(l);
            });
            let parts: Vec<(Chan, Formula)> = ps.iter().map(|(l, y)| (pick(l, &mut used), y.clone())).collect();
            let names = parts.iter().map(|(p, _)| p.clone()).collect();
            let mut t = s.clone();
            t.splice(c, parts);
            Some(Step::Split(names, t))
        }
        (Formula::Par(ps), Side::Dom) | (Formula::Tensor(ps), Side::Cod) => {
            let mut used = names_in(s);
            ps.iter().for_each(|(l, _)| {
                used.remove(l);
            });
            Some(Step::Fork(ps.iter().map(|(l, y)| (pick(l, &mut used), side, y.clone())).collect()))
        }
    }
}

/// Every assignment of `items` to `n` bins.
fn assignments<T: Clone>(items: &[T], n: usize) -> Vec<Vec<Vec<T>>> {
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
    if n == 0 && !items.is_empty() {
        return vec![];
    }
    out
}

fn product(lists: Vec<Rc<Vec<Term>>>) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = vec![vec![]];
    for l in lists {
        out = out
            .into_iter()
            .flat_map(|p| {
                l.iter().map(move |t| {
                    let mut p = p.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
        if out.is_empty() {
            break;
        }
    }
    out
}

/// The leaves that close a sequent: an identity on two matching atoms or an
/// axiom whose ports cover the sequent exactly.
fn leaves(s: &Sequent, sig: &Signature) -> Vec<Term> {
    let mut out = Vec::new();
    if s.dom.len() == 1 && s.cod.len() == 1 {
        let (a, x) = s.dom.get_index(0).expect("one");
        let (b, y) = s.cod.get_index(0).expect("one");
        if x.is_atom() && x == y {
            out.push(Term::Id(a.clone(), b.clone()));
        }
    }
    for (name, ty) in &sig.axioms {
        if ty.ins.len() != s.dom.len() || ty.outs.len() != s.cod.len() {
            continue;
        }
        let fill = |want: &[Formula], have: &indexmap::IndexMap<Chan, Formula>| -> Vec<Vec<Chan>> {
            let mut res: Vec<Vec<Chan>> = vec![vec![]];
            for w in want {
                res = res
                    .into_iter()
                    .flat_map(|p| {
                        have.iter()
                            .filter(|(c, x)| x.same_type(w) && !p.contains(c))
                            .map(|(c, _)| {
                                let mut p = p.clone();
                                p.push(c.clone());
                                p
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect();
            }
            res
        };
        for ins in fill(&ty.ins, &s.dom) {
            for outs in fill(&ty.outs, &s.cod) {
                out.push(Term::Axiom { name: name.clone(), ins: ins.clone(), outs });
            }
        }
    }
    out
}

/// Cut-free proof enumeration with memoization and a cap on the number of
/// terms built.
pub struct Prover<'a> {
    sig: &'a Signature,
    budget: usize,
    built: usize,
    truncated: bool,
    memo: HashMap<String, Rc<Vec<Term>>>,
}

impl<'a> Prover<'a> {
    pub fn new(sig: &'a Signature, budget: usize) -> Self {
        Prover { sig, budget, built: 0, truncated: false, memo: HashMap::new() }
    }

    /// False once some list was cut short by the budget.
    pub fn exhaustive(&self) -> bool {
        !self.truncated
    }

    fn keep(&mut self, mut v: Vec<Term>) -> Vec<Term> {
        let room = self.budget.saturating_sub(self.built);
        if v.len() > room {
            v.truncate(room);
            self.truncated = true;
        }
        self.built += v.len();
        v
    }

    pub fn proofs(&mut self, s: &Sequent) -> Rc<Vec<Term>> {
        let key = format!("{s}");
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = leaves(s, self.sig);
        let chans: Vec<Chan> = s.iter().map(|(_, c, _)| c.clone()).collect();
        for c in &chans {
            if self.truncated {
                break;
            }
            let Some(step) = step_for(s, c) else { continue };
            let made = match step {
                Step::Case(bs) if bs.is_empty() => {
                    vec![Term::Case { chan: c.clone(), branches: vec![], ctx: Some(s.clone()) }]
                }
                Step::Case(bs) => {
                    let lists = bs.iter().map(|(_, t)| self.proofs(t)).collect();
                    product(lists)
                        .into_iter()
                        .map(|bodies| Term::Case {
                            chan: c.clone(),
                            branches: bs.iter().map(|(t, _)| t.clone()).zip(bodies).collect(),
                            ctx: None,
                        })
                        .collect()
                }
                Step::Select(bs) => {
                    let mut v = Vec::new();
                    for (tag, t) in bs {
                        for b in self.proofs(&t).iter() {
                            v.push(Term::Select { chan: c.clone(), tag: tag.clone(), body: Box::new(b.clone()) });
                        }
                    }
                    v
                }
                Step::Split(parts, t) => self
                    .proofs(&t)
                    .iter()
                    .map(|b| Term::Split { chan: c.clone(), parts: parts.clone(), body: Box::new(b.clone()) })
                    .collect(),
                Step::Fork(arms) => self.forks(s, c, &arms),
            };
            let made = self.keep(made);
            out.extend(made);
        }
        let v = Rc::new(out);
        self.memo.insert(key, v.clone());
        v
    }

    fn forks(&mut self, s: &Sequent, c: &Chan, arms: &[(Chan, Side, Formula)]) -> Vec<Term> {
        let others: Vec<Chan> = s.iter().map(|(_, d, _)| d.clone()).filter(|d| d != c).collect();
        if arms.is_empty() {
            return if others.is_empty() { vec![Term::Fork { chan: c.clone(), arms: vec![] }] } else { vec![] };
        }
        let mut out = Vec::new();
        for bins in assignments(&others, arms.len()) {
            let mut lists = Vec::new();
            for (i, (part, side, y)) in arms.iter().enumerate() {
                let keep: BTreeSet<Chan> = bins[i].iter().cloned().collect();
                let mut t = s.restrict(&keep);
                t.side_mut(*side).insert(part.clone(), y.clone());
                lists.push(self.proofs(&t));
            }
            for bodies in product(lists) {
                out.push(Term::Fork {
                    chan: c.clone(),
                    arms: arms
                        .iter()
                        .zip(&bins)
                        .zip(bodies)
                        .map(|(((part, _, _), owns), body)| Arm { part: part.clone(), owns: owns.iter().cloned().collect(), body })
                        .collect(),
                });
            }
        }
        out
    }
}

/// All cut-free proofs of `s`, and whether the list is complete.
pub fn cut_free_proofs(s: &Sequent, sig: &Signature, budget: usize) -> (Vec<Term>, bool) {
    let mut p = Prover::new(sig, budget);
    let v = p.proofs(s);
    (v.as_ref().clone(), p.exhaustive())
}

/// Enumerates terms whose cut formulas have total size exactly `extra`,
/// drawing cut formulas from `cut_formulas`.
pub struct TermEnumerator<'a> {
    sig: &'a Signature,
    cut_formulas: Vec<Formula>,
    budget: usize,
    built: usize,
    truncated: bool,
    memo: HashMap<(String, usize), Rc<Vec<Term>>>,
}

impl<'a> TermEnumerator<'a> {
    pub fn new(sig: &'a Signature, cut_formulas: Vec<Formula>, budget: usize) -> Self {
        TermEnumerator { sig, cut_formulas, budget, built: 0, truncated: false, memo: HashMap::new() }
    }

    pub fn exhaustive(&self) -> bool {
        !self.truncated
    }

    /// Every term of `s` with total cut-formula size at most `extra`.
    pub fn terms_up_to(&mut self, s: &Sequent, extra: usize) -> Vec<Term> {
        (0..=extra).flat_map(|e| self.terms(s, e).as_ref().clone()).collect()
    }

    fn keep(&mut self, mut v: Vec<Term>) -> Vec<Term> {
        let room = self.budget.saturating_sub(self.built);
        if v.len() > room {
            v.truncate(room);
            self.truncated = true;
        }
        self.built += v.len();
        v
    }

    pub fn terms(&mut self, s: &Sequent, extra: usize) -> Rc<Vec<Term>> {
        let key = (format!("{s}"), extra);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = if extra == 0 { leaves(s, self.sig) } else { vec![] };
        let chans: Vec<Chan> = s.iter().map(|(_, c, _)| c.clone()).collect();
        for c in &chans {
            if self.truncated {
                break;
            }
            let Some(step) = step_for(s, c) else { continue };
            let made: Vec<Term> = match step {
                Step::Case(bs) if bs.is_empty() => {
                    if extra == 0 {
                        vec![Term::Case { chan: c.clone(), branches: vec![], ctx: Some(s.clone()) }]
                    } else {
                        vec![]
                    }
                }
                Step::Case(bs) => {
                    let mut v = Vec::new();
                    for split in weak_compositions(extra, bs.len()) {
                        let lists = bs.iter().zip(&split).map(|((_, t), &e)| self.terms(t, e)).collect();
                        for bodies in product(lists) {
                            v.push(Term::Case {
                                chan: c.clone(),
                                branches: bs.iter().map(|(t, _)| t.clone()).zip(bodies).collect(),
                                ctx: None,
                            });
                        }
                    }
                    v
                }
                Step::Select(bs) => {
                    let mut v = Vec::new();
                    for (tag, t) in bs {
                        for b in self.terms(&t, extra).iter() {
                            v.push(Term::Select { chan: c.clone(), tag: tag.clone(), body: Box::new(b.clone()) });
                        }
                    }
                    v
                }
                Step::Split(parts, t) => self
                    .terms(&t, extra)
                    .iter()
                    .map(|b| Term::Split { chan: c.clone(), parts: parts.clone(), body: Box::new(b.clone()) })
                    .collect(),
                Step::Fork(arms) => self.forks(s, c, &arms, extra),
            };
            let made = self.keep(made);
            out.extend(made);
        }
        let cuts = self.cuts(s, extra);
        let cuts = self.keep(cuts);
        out.extend(cuts);
        let v = Rc::new(out);
        self.memo.insert(key, v.clone());
        v
    }

    fn forks(&mut self, s: &Sequent, c: &Chan, arms: &[(Chan, Side, Formula)], extra: usize) -> Vec<Term> {
        let others: Vec<Chan> = s.iter().map(|(_, d, _)| d.clone()).filter(|d| d != c).collect();
        if arms.is_empty() {
            return if others.is_empty() && extra == 0 { vec![Term::Fork { chan: c.clone(), arms: vec![] }] } else { vec![] };
        }
        let mut out = Vec::new();
        for bins in assignments(&others, arms.len()) {
            for split in weak_compositions(extra, arms.len()) {
                let mut lists = Vec::new();
                for (i, (part, side, y)) in arms.iter().enumerate() {
                    let keep: BTreeSet<Chan> = bins[i].iter().cloned().collect();
                    let mut t = s.restrict(&keep);
                    t.side_mut(*side).insert(part.clone(), y.clone());
                    lists.push(self.terms(&t, split[i]));
                }
                for bodies in product(lists) {
                    out.push(Term::Fork {
                        chan: c.clone(),
                        arms: arms
                            .iter()
                            .zip(&bins)
                            .zip(bodies)
                            .map(|(((part, _, _), owns), body)| Arm { part: part.clone(), owns: owns.iter().cloned().collect(), body })
                            .collect(),
                    });
                }
            }
        }
        out
    }

    fn cuts(&mut self, s: &Sequent, extra: usize) -> Vec<Term> {
        let mut out = Vec::new();
        let chans: Vec<Chan> = s.iter().map(|(_, c, _)| c.clone()).collect();
        let mut used = names_in(s);
        let g = crate::core::fresh_numbered("g", &used);
        used.insert(g.clone());
        for x in self.cut_formulas.clone() {
            let size = x.size();
            if size > extra {
                continue;
            }
            let x = x.relabel(&g, &mut used.clone());
            for bins in assignments(&chans, 2) {
                let lk: BTreeSet<Chan> = bins[0].iter().cloned().collect();
                let rk: BTreeSet<Chan> = bins[1].iter().cloned().collect();
                let mut ls = s.restrict(&lk);
                ls.cod.insert(g.clone(), x.clone());
                let mut rs = s.restrict(&rk);
                rs.dom.shift_insert(0, g.clone(), x.clone());
                for e1 in 0..=extra - size {
                    let lefts = self.terms(&ls, e1);
                    if lefts.is_empty() {
                        continue;
                    }
                    let rights = self.terms(&rs, extra - size - e1);
                    for l in lefts.iter() {
                        for r in rights.iter() {
                            out.push(Term::Cut { chan: g.clone(), ty: Some(x.clone()), left: Box::new(l.clone()), right: Box::new(r.clone()) });
                        }
                    }
                }
            }
        }
        out
    }
}
