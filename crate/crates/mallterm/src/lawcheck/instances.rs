//! Random instances for the law checks, sweeps over them, and the exhaustive
//! corpus of small terms.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_assoc, check_identity_law, check_injection, check_interchange, check_poly_sum, check_representability, LawError};
use crate::checker::{check, sequent_from, TypedTerm};
use crate::core::{Chan, Formula, Sequent, Side, Signature, Tag};
use crate::generate::{atoms_only, three_axioms, GenConfig, Generator};
use crate::prover::{formulas_of_size, sequents_up_to, TermEnumerator};
use crate::surface::SyntaxKind;

const TAGS: [&str; 3] = ["a", "b", "c"];
/// Attempts at a provable instance shape before giving up on a seed.
const TRIES: usize = 500;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    Identity,
    Assoc,
    Interchange,
    PolySum,
    Representability,
    Injection,
}

impl Law {
    pub const ALL: [Law; 6] = [Law::Identity, Law::Assoc, Law::Interchange, Law::PolySum, Law::Representability, Law::Injection];

    pub fn name(self) -> &'static str {
        match self {
            Law::Identity => "identity",
            Law::Assoc => "assoc",
            Law::Interchange => "interchange",
            Law::PolySum => "poly-sum",
            Law::Representability => "representability",
            Law::Injection => "injection",
        }
    }

    pub fn from_name(s: &str) -> Option<Law> {
        Law::ALL.into_iter().find(|l| l.name() == s)
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// No provable instance was found for this seed.
    Skip,
    Error(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub law: Law,
    pub seed: u64,
    /// Hash of the printed instance.
    pub instance: String,
    pub verdict: Verdict,
    /// The printed instance, kept for failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn hash_of(s: &str) -> String {
    let mut h = DefaultHasher::new();
    s.hash(&mut h);
    format!("{:016x}", h.finish())
}

fn chan(s: &str) -> Chan {
    Chan::from(s)
}

fn sequent(parts: Vec<(Side, Chan, Formula)>) -> Sequent {
    sequent_from(parts)
}

fn side_entries(side: Side, v: &[(Chan, Formula)]) -> Vec<(Side, Chan, Formula)> {
    v.iter().map(|(c, x)| (side, c.clone(), x.clone())).collect()
}

/// Formula size used by the sweeps unless told otherwise.
pub const DEFAULT_MAX_FORMULA: usize = 2;

fn gen_config(max_formula: usize) -> GenConfig {
    GenConfig { max_depth: 5, max_formula, ..GenConfig::default() }
}

/// A term and one of its channels.
pub fn identity_instance(g: &mut Generator) -> (TypedTerm, Chan) {
    let t = g.typed();
    let chans: Vec<Chan> = t.seq.channels().into_iter().collect();
    let c = chans.choose(g.rng()).expect("nonempty sequent").clone();
    (t, c)
}

/// `f : G1 |- u:X, D1`, `g : u:X, G2 |- v:Y, D2`, `h : v:Y, G3 |- D3`.
pub fn assoc_instance(g: &mut Generator) -> Option<(TypedTerm, TypedTerm, TypedTerm, Chan, Chan)> {
    let (u, v) = (chan("u"), chan("v"));
    for _ in 0..TRIES {
        let mut taken: BTreeSet<Chan> = [u.clone(), v.clone()].into();
        let x = g.formula_for(&u, &mut taken);
        let y = g.formula_for(&v, &mut taken);
        let (g1, d1) = (g.context("x", 1, &mut taken), g.context("y", 1, &mut taken));
        let s1 = sequent([side_entries(Side::Dom, &g1), vec![(Side::Cod, u.clone(), x.clone())], side_entries(Side::Cod, &d1)].concat());
        let Some(f) = g.prove(&s1) else { continue };
        let (g2, d2) = (g.context("z", 1, &mut taken), g.context("w", 1, &mut taken));
        let s2 = sequent(
            [vec![(Side::Dom, u.clone(), x.clone())], side_entries(Side::Dom, &g2), vec![(Side::Cod, v.clone(), y.clone())], side_entries(Side::Cod, &d2)]
                .concat(),
        );
        let Some(gt) = g.prove(&s2) else { continue };
        let (g3, d3) = (g.context("p", 1, &mut taken), g.context("q", 1, &mut taken));
        let s3 = sequent([vec![(Side::Dom, v.clone(), y.clone())], side_entries(Side::Dom, &g3), side_entries(Side::Cod, &d3)].concat());
        let Some(h) = g.prove(&s3) else { continue };
        return Some((f, gt, h, u, v));
    }
    None
}

/// `f` with `u` and `v` both in its codomain (or with `dual`, both in its
/// domain), `g` on the other end of `u` and `h` on the other end of `v`.
pub fn interchange_instance(g: &mut Generator, dual: bool) -> Option<(TypedTerm, TypedTerm, TypedTerm, Chan, Chan)> {
    let (u, v) = (chan("u"), chan("v"));
    let (near, far) = if dual { (Side::Dom, Side::Cod) } else { (Side::Cod, Side::Dom) };
    for _ in 0..TRIES {
        let mut taken: BTreeSet<Chan> = [u.clone(), v.clone()].into();
        let x = g.formula_for(&u, &mut taken);
        let y = g.formula_for(&v, &mut taken);
        let (g1, d1) = (g.context("x", 1, &mut taken), g.context("y", 1, &mut taken));
        let s1 = sequent(
            [side_entries(Side::Dom, &g1), side_entries(Side::Cod, &d1), vec![(near, u.clone(), x.clone()), (near, v.clone(), y.clone())]].concat(),
        );
        let Some(f) = g.prove(&s1) else { continue };
        let (g2, d2) = (g.context("z", 1, &mut taken), g.context("w", 1, &mut taken));
        let s2 = sequent([vec![(far, u.clone(), x.clone())], side_entries(Side::Dom, &g2), side_entries(Side::Cod, &d2)].concat());
        let Some(gt) = g.prove(&s2) else { continue };
        let (g3, d3) = (g.context("p", 1, &mut taken), g.context("q", 1, &mut taken));
        let s3 = sequent([vec![(far, v.clone(), y.clone())], side_entries(Side::Dom, &g3), side_entries(Side::Cod, &d3)].concat());
        let Some(h) = g.prove(&s3) else { continue };
        return Some((f, gt, h, u, v));
    }
    None
}

/// A family of `arity` components with labels derived from `alpha`.
fn components(g: &mut Generator, alpha: &Chan, arity: usize, taken: &mut BTreeSet<Chan>) -> Vec<Formula> {
    (0..arity)
        .map(|i| {
            let parent = Chan::from(format!("{alpha}_{}", i + 1).as_str());
            g.formula_for(&parent, taken)
        })
        .collect()
}

/// `t` over a sum `alpha` on the left (a product on the right with
/// `product`), and one term per component.
pub fn poly_instance(g: &mut Generator, product: bool, arity: usize) -> Option<(TypedTerm, Chan, Vec<TypedTerm>)> {
    let alpha = chan("al");
    let side = if product { Side::Cod } else { Side::Dom };
    for _ in 0..TRIES {
        let mut taken: BTreeSet<Chan> = [alpha.clone()].into();
        let xs = components(g, &alpha, arity, &mut taken);
        let tagged: Vec<(Tag, Formula)> = xs.iter().enumerate().map(|(i, x)| (Tag::from(TAGS[i]), x.clone())).collect();
        let whole = if product { Formula::Prod(tagged) } else { Formula::Sum(tagged) };
        let (gam, del) = (g.context("x", 1, &mut taken), g.context("y", 1, &mut taken));
        let s = sequent([vec![(side, alpha.clone(), whole)], side_entries(Side::Dom, &gam), side_entries(Side::Cod, &del)].concat());
        let mut parts = Vec::new();
        for x in &xs {
            let mut sk = s.clone();
            sk.replace(&alpha, x.clone());
            match g.prove(&sk) {
                Some(p) => parts.push(p),
                None => break,
            }
        }
        if parts.len() != arity {
            continue;
        }
        let Some(t) = g.prove(&s) else { continue };
        return Some((t, alpha, parts));
    }
    None
}

/// `t` over a tensor `alpha` on the left (a par on the right with `par`),
/// and `s` over its components.
pub fn repr_instance(g: &mut Generator, par: bool, arity: usize) -> Option<(TypedTerm, Chan, TypedTerm)> {
    let alpha = chan("al");
    let side = if par { Side::Cod } else { Side::Dom };
    for _ in 0..TRIES {
        let mut taken: BTreeSet<Chan> = [alpha.clone()].into();
        let labels: Vec<Chan> = (1..=arity).map(|i| Chan::from(format!("{alpha}_{i}").as_str())).collect();
        taken.extend(labels.iter().cloned());
        let xs: Vec<Formula> = labels.iter().map(|l| g.formula_for(l, &mut taken)).collect();
        let parts: Vec<(Chan, Formula)> = labels.into_iter().zip(xs).collect();
        let whole = if par { Formula::Par(parts.clone()) } else { Formula::Tensor(parts.clone()) };
        let (gam, del) = (g.context("x", 1, &mut taken), g.context("y", 1, &mut taken));
        let s = sequent([vec![(side, alpha.clone(), whole)], side_entries(Side::Dom, &gam), side_entries(Side::Cod, &del)].concat());
        let mut spread = s.clone();
        spread.splice(&alpha, parts);
        let Some(sp) = g.prove(&spread) else { continue };
        let Some(t) = g.prove(&s) else { continue };
        return Some((t, alpha, sp));
    }
    None
}

/// `f` with `alpha` on either side, and a sum (right) or product (left)
/// with `alpha`'s type at one tag.
pub fn injection_instance(g: &mut Generator) -> Option<(TypedTerm, Chan, Formula, Tag)> {
    let alpha = chan("al");
    for _ in 0..TRIES {
        let side = if g.rng().gen_bool(0.5) { Side::Cod } else { Side::Dom };
        let mut taken: BTreeSet<Chan> = [alpha.clone()].into();
        let arity = g.rng().gen_range(1..=3);
        let xs = components(g, &alpha, arity, &mut taken);
        let k = g.rng().gen_range(0..arity);
        let tagged: Vec<(Tag, Formula)> = xs.iter().enumerate().map(|(i, x)| (Tag::from(TAGS[i]), x.clone())).collect();
        let whole = if side == Side::Cod { Formula::Sum(tagged) } else { Formula::Prod(tagged) };
        let (gam, del) = (g.context("x", 1, &mut taken), g.context("y", 1, &mut taken));
        let s = sequent([vec![(side, alpha.clone(), xs[k].clone())], side_entries(Side::Dom, &gam), side_entries(Side::Cod, &del)].concat());
        let Some(f) = g.prove(&s) else { continue };
        return Some((f, alpha, whole, Tag::from(TAGS[k])));
    }
    None
}

fn text(ts: &[&TypedTerm]) -> String {
    ts.iter().map(|t| format!("{} --- {}", t.seq, t.print(SyntaxKind::TermCalc))).collect::<Vec<_>>().join("\n")
}

/// Runs one instance of `law` drawn from `seed`. Even seeds use a
/// signature without axioms, odd seeds one with three. Generated formulas
/// have at most `max_formula` connectives and atoms.
pub fn run_law(law: Law, seed: u64, max_formula: usize) -> LawReport {
    let sig = if seed % 2 == 0 { atoms_only() } else { three_axioms() };
    let mut g = Generator::new(&sig, gen_config(max_formula), seed);
    let outcome: Option<(String, Result<bool, LawError>)> = match law {
        Law::Identity => {
            let (f, c) = identity_instance(&mut g);
            Some((format!("{}\nat {c}", text(&[&f])), check_identity_law(&f, &c)))
        }
        Law::Assoc => assoc_instance(&mut g).map(|(f, gt, h, u, v)| (text(&[&f, &gt, &h]), check_assoc(&f, &gt, &h, &u, &v))),
        Law::Interchange => {
            let dual = g.rng().gen_bool(0.5);
            interchange_instance(&mut g, dual).map(|(f, gt, h, u, v)| (text(&[&f, &gt, &h]), check_interchange(&f, &gt, &h, &u, &v)))
        }
        Law::PolySum => {
            let product = g.rng().gen_bool(0.5);
            let arity = g.rng().gen_range(0..=3);
            poly_instance(&mut g, product, arity).map(|(t, a, s)| {
                let mut all = vec![&t];
                all.extend(s.iter());
                (text(&all), check_poly_sum(&t, &a, &s))
            })
        }
        Law::Representability => {
            let par = g.rng().gen_bool(0.5);
            let arity = g.rng().gen_range(0..=3);
            repr_instance(&mut g, par, arity).map(|(t, a, s)| (text(&[&t, &s]), check_representability(&t, &a, &s)))
        }
        Law::Injection => injection_instance(&mut g).map(|(f, a, w, k)| (format!("{}\ninto {w} at {k}", text(&[&f])), check_injection(&f, &a, &w, &k))),
    };
    match outcome {
        None => LawReport { law, seed, instance: String::new(), verdict: Verdict::Skip, detail: None },
        Some((shown, result)) => {
            let verdict = match result {
                Ok(true) => Verdict::Pass,
                Ok(false) => Verdict::Fail,
                Err(e) => Verdict::Error(e.to_string()),
            };
            let detail = (verdict != Verdict::Pass).then(|| shown.clone());
            LawReport { law, seed, instance: hash_of(&shown), verdict, detail }
        }
    }
}

/// `count` instances of `law` from seeds `seed..`, in seed order.
pub fn sweep(law: Law, seed: u64, count: usize, max_formula: usize) -> Vec<LawReport> {
    (0..count as u64).into_par_iter().map(|i| run_law(law, seed.wrapping_add(i), max_formula)).collect()
}

/// Every checked term over every sequent with at most `max` subformula
/// occurrences, counting those of the cut formulas.
pub struct Corpus {
    pub terms: Vec<TypedTerm>,
    /// False when some enumeration hit its budget.
    pub complete: bool,
}

pub fn exhaustive_corpus(max: usize, atoms: &[&str], width: usize, sig: &Signature, budget: usize) -> Corpus {
    let cut_formulas: Vec<Formula> = (1..max).flat_map(|k| formulas_of_size(k, atoms, width)).collect();
    let seqs = sequents_up_to(max, atoms, width);
    let per: Vec<(Vec<TypedTerm>, bool)> = seqs
        .par_iter()
        .map(|s| {
            let extra = max - s.subformula_count();
            let mut e = TermEnumerator::new(sig, cut_formulas.clone(), budget);
            let terms = e.terms_up_to(s, extra);
            let typed = terms.iter().map(|t| check(t, s, sig).expect("enumerated terms check")).collect();
            (typed, e.exhaustive())
        })
        .collect();
    let complete = per.iter().all(|(_, c)| *c);
    Corpus { terms: per.into_iter().flat_map(|(t, _)| t).collect(), complete }
}
