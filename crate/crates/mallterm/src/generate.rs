//! Random well-typed terms, for property tests and sweeps.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::checker::{check, TypedTerm};
use crate::core::{fresh_numbered, Arm, Chan, Formula, Sequent, Signature, Tag, Term};
use crate::prover::{names_in, step_for, Prover, Step};
use crate::surface::parse_signature;

const TAGS: [&str; 3] = ["a", "b", "c"];

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Bound on `Term::depth` of the result.
    pub max_depth: usize,
    /// Most components per connective (case branches, fork arms).
    pub width: usize,
    /// Largest formula in a generated sequent.
    pub max_formula: usize,
    /// Most formulas in a generated sequent.
    pub max_channels: usize,
    /// Chance of trying a cut before a rule at each node.
    pub cut_rate: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_depth: 6, width: 3, max_formula: 3, max_channels: 3, cut_rate: 0.35 }
    }
}

/// Atoms `A`, `B`, `C` and no axioms.
pub fn atoms_only() -> Signature {
    parse_signature("atom A, B, C").expect("valid")
}

/// Atoms `A`, `B`, `C` and three axioms.
pub fn three_axioms() -> Signature {
    parse_signature("atom A, B, C\naxiom f : A -> B\naxiom g : B, C -> A\naxiom k : -> C").expect("valid")
}

pub struct Generator<'a> {
    sig: &'a Signature,
    cfg: GenConfig,
    rng: StdRng,
    atoms: Vec<String>,
}

impl<'a> Generator<'a> {
    pub fn new(sig: &'a Signature, cfg: GenConfig, seed: u64) -> Self {
        let atoms = sig.atoms.iter().cloned().collect();
        Generator { sig, cfg, rng: StdRng::seed_from_u64(seed), atoms }
    }

    /// A formula with exactly `size` subformula occurrences. Tensor and par
    /// labels are placeholders.
    pub fn formula(&mut self, size: usize) -> Formula {
        if size <= 1 {
            let units = [Formula::zero(), Formula::one(), Formula::top(), Formula::bot()];
            // atoms twice as likely as units
            let n = self.atoms.len();
            let i = self.rng.gen_range(0..2 * n + units.len());
            return if i < 2 * n { Formula::atom(&self.atoms[i / 2]) } else { units[i - 2 * n].clone() };
        }
        let k = self.rng.gen_range(1..=self.cfg.width.min(size - 1));
        let mut sizes = vec![1; k];
        for _ in 0..(size - 1 - k) {
            let i = self.rng.gen_range(0..k);
            sizes[i] += 1;
        }
        let parts: Vec<Formula> = sizes.into_iter().map(|s| self.formula(s)).collect();
        let tagged = || parts.iter().enumerate().map(|(i, x)| (Tag::from(TAGS[i]), x.clone())).collect();
        let chans = || parts.iter().enumerate().map(|(i, x)| (Chan::from(format!("p{i}").as_str()), x.clone())).collect();
        match self.rng.gen_range(0..4) {
            0 => Formula::Sum(tagged()),
            1 => Formula::Prod(tagged()),
            2 => Formula::Tensor(chans()),
            _ => Formula::Par(chans()),
        }
    }

    /// A random sequent with channels `a1..` on the left and `b1..` on the
    /// right.
    pub fn sequent(&mut self) -> Sequent {
        let n = self.rng.gen_range(1..=self.cfg.max_channels);
        let mut dom = Vec::new();
        let mut cod = Vec::new();
        for _ in 0..n {
            let size = self.rng.gen_range(1..=self.cfg.max_formula);
            let x = self.formula(size);
            if self.rng.gen_bool(0.5) {
                dom.push(x);
            } else {
                cod.push(x);
            }
        }
        let mut taken = BTreeSet::new();
        let name = |prefix: &str, xs: Vec<Formula>, taken: &mut BTreeSet<Chan>| -> Vec<(Chan, Formula)> {
            let named: Vec<Chan> = (1..=xs.len()).map(|i| Chan::from(format!("{prefix}{i}").as_str())).collect();
            taken.extend(named.iter().cloned());
            named.into_iter().zip(xs).collect()
        };
        let dom = name("a", dom, &mut taken);
        let cod = name("b", cod, &mut taken);
        let relabel = |v: Vec<(Chan, Formula)>, taken: &mut BTreeSet<Chan>| -> Vec<(Chan, Formula)> {
            v.into_iter()
                .map(|(c, x)| {
                    let y = x.relabel(&c, taken);
                    (c, y)
                })
                .collect()
        };
        let dom = relabel(dom, &mut taken);
        let cod = relabel(cod, &mut taken);
        Sequent::new(dom, cod).expect("fresh labels")
    }

    /// A formula of size `1..=max_formula` whose tensor and par labels are
    /// derived from `chan`.
    pub fn formula_for(&mut self, chan: &Chan, taken: &mut BTreeSet<Chan>) -> Formula {
        let size = self.rng.gen_range(1..=self.cfg.max_formula);
        self.formula(size).relabel(chan, taken)
    }

    /// Up to `max` channels `<prefix>1..` with random formulas.
    pub fn context(&mut self, prefix: &str, max: usize, taken: &mut BTreeSet<Chan>) -> Vec<(Chan, Formula)> {
        let n = self.rng.gen_range(0..=max);
        (1..=n)
            .map(|i| {
                let c = Chan::from(format!("{prefix}{i}").as_str());
                taken.insert(c.clone());
                let x = self.formula_for(&c, taken);
                (c, x)
            })
            .collect()
    }

    pub fn rng(&mut self) -> &mut StdRng {
        &mut self.rng
    }

    /// A random checked term of `s`, if `s` is provable within the bounds.
    pub fn prove(&mut self, s: &Sequent) -> Option<TypedTerm> {
        let t = self.term(s)?;
        let t = check(&t, s, self.sig).expect("generated terms are well typed");
        Some(t.recheck(&t.minimal_term()).expect("minimal terms re-check"))
    }

    /// A random term of `s`, if one within the depth bound was found.
    pub fn term(&mut self, s: &Sequent) -> Option<Term> {
        let mut prover = Prover::new(self.sig, 20_000);
        if prover.proofs(s).is_empty() {
            return None;
        }
        self.go(s, self.cfg.max_depth, &mut prover)
    }

    /// A random well-typed term over a random provable sequent.
    pub fn typed(&mut self) -> TypedTerm {
        loop {
            let s = self.sequent();
            if let Some(t) = self.prove(&s) {
                return t;
            }
        }
    }

    fn go(&mut self, s: &Sequent, depth: usize, prover: &mut Prover) -> Option<Term> {
        if depth == 0 {
            return None;
        }
        let mut choices: Vec<Option<Chan>> = s.iter().map(|(_, c, _)| Some(c.clone())).collect();
        choices.shuffle(&mut self.rng);
        if depth >= 3 && self.rng.gen_bool(self.cfg.cut_rate) {
            choices.insert(0, None);
        }
        for choice in choices {
            let made = match choice {
                None => self.cut(s, depth, prover),
                Some(c) => self.rule(s, &c, depth, prover),
            };
            if made.is_some() {
                return made;
            }
        }
        // close with a shallow cut-free proof
        let proofs: Vec<Term> = prover.proofs(s).iter().filter(|p| p.depth() <= depth).cloned().collect();
        proofs.choose(&mut self.rng).cloned()
    }

    fn rule(&mut self, s: &Sequent, c: &Chan, depth: usize, prover: &mut Prover) -> Option<Term> {
        let leaf_or_none = |p: &mut Prover, s: &Sequent| -> bool { !p.proofs(s).is_empty() };
        match step_for(s, c)? {
            Step::Case(bs) if bs.is_empty() => Some(Term::Case { chan: c.clone(), branches: vec![], ctx: Some(s.clone()) }),
            Step::Case(bs) => {
                if !bs.iter().all(|(_, t)| leaf_or_none(prover, t)) {
                    return None;
                }
                let mut branches = Vec::new();
                for (tag, t) in bs {
                    branches.push((tag, self.go(&t, depth - 1, prover)?));
                }
                Some(Term::Case { chan: c.clone(), branches, ctx: None })
            }
            Step::Select(bs) => {
                let live: Vec<(Tag, Sequent)> = bs.into_iter().filter(|(_, t)| leaf_or_none(prover, t)).collect();
                let (tag, t) = live.choose(&mut self.rng)?.clone();
                let body = self.go(&t, depth - 1, prover)?;
                Some(Term::Select { chan: c.clone(), tag, body: Box::new(body) })
            }
            Step::Split(parts, t) => {
                if !leaf_or_none(prover, &t) {
                    return None;
                }
                let body = self.go(&t, depth - 1, prover)?;
                Some(Term::Split { chan: c.clone(), parts, body: Box::new(body) })
            }
            Step::Fork(arms) => {
                let others: Vec<Chan> = s.channels().into_iter().filter(|d| d != c).collect();
                if arms.is_empty() {
                    return others.is_empty().then(|| Term::Fork { chan: c.clone(), arms: vec![] });
                }
                for _ in 0..4 {
                    let bins: Vec<usize> = others.iter().map(|_| self.rng.gen_range(0..arms.len())).collect();
                    let arm_seqs: Vec<Sequent> = (0..arms.len())
                        .map(|j| {
                            let keep = others.iter().zip(&bins).filter(|(_, b)| **b == j).map(|(o, _)| o.clone()).collect();
                            let mut t = s.restrict(&keep);
                            let (part, side, y) = &arms[j];
                            t.side_mut(*side).insert(part.clone(), y.clone());
                            t
                        })
                        .collect();
                    if !arm_seqs.iter().all(|t| leaf_or_none(prover, t)) {
                        continue;
                    }
                    let mut built = Vec::new();
                    for (j, t) in arm_seqs.iter().enumerate() {
                        let body = self.go(t, depth - 1, prover)?;
                        let mut owns: BTreeSet<Chan> = t.channels();
                        owns.remove(&arms[j].0);
                        built.push(Arm { part: arms[j].0.clone(), owns, body });
                    }
                    return Some(Term::Fork { chan: c.clone(), arms: built });
                }
                None
            }
        }
    }

    fn cut(&mut self, s: &Sequent, depth: usize, prover: &mut Prover) -> Option<Term> {
        let mut used = names_in(s);
        let gamma = fresh_numbered("g", &used);
        used.insert(gamma.clone());
        let size = self.rng.gen_range(1..=2);
        let x = self.formula(size).relabel(&gamma, &mut used);
        let chans: Vec<Chan> = s.channels().into_iter().collect();
        for _ in 0..4 {
            let (l, r): (Vec<Chan>, Vec<Chan>) = chans.iter().cloned().partition(|_| self.rng.gen_bool(0.5));
            let mut left = s.restrict(&l.into_iter().collect());
            left.cod.insert(gamma.clone(), x.clone());
            let mut right = s.restrict(&r.into_iter().collect());
            right.dom.insert(gamma.clone(), x.clone());
            if prover.proofs(&left).is_empty() || prover.proofs(&right).is_empty() {
                continue;
            }
            let f = self.go(&left, depth - 1, prover)?;
            let g = self.go(&right, depth - 1, prover)?;
            return Some(Term::Cut { chan: gamma, ty: Some(x.clone()), left: Box::new(f), right: Box::new(g) });
        }
        None
    }
}

/// `n` random well-typed terms from consecutive seeds.
pub fn corpus(sig: &Signature, cfg: &GenConfig, seed: u64, n: usize) -> Vec<TypedTerm> {
    (0..n as u64).map(|i| Generator::new(sig, cfg.clone(), seed.wrapping_add(i)).typed()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_respect_the_bounds() {
        for sig in [atoms_only(), three_axioms()] {
            let terms = corpus(&sig, &GenConfig::default(), 7, 200);
            assert!(terms.iter().all(|t| t.term.depth() <= 6));
            assert!(terms.iter().any(|t| t.term.cut_count() > 0));
        }
        let with_axioms = corpus(&three_axioms(), &GenConfig::default(), 7, 200);
        assert!(with_axioms.iter().any(|t| t.term.axiom_count() > 0));
    }

    #[test]
    fn same_seed_same_term() {
        let sig = three_axioms();
        let a = Generator::new(&sig, GenConfig::default(), 42).typed();
        let b = Generator::new(&sig, GenConfig::default(), 42).typed();
        assert_eq!(a.term, b.term);
    }
}
