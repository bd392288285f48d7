use std::collections::BTreeSet;
use std::sync::Arc;

use super::{check_arc, TypedTerm};
use crate::core::{Arm, Chan, Formula, Sequent, Signature, Term};

fn fresh(base: &Chan, i: usize, used: &mut BTreeSet<Chan>) -> Chan {
    let mut c = Chan::from(format!("{base}_{i}").as_str());
    if used.contains(&c) {
        c = crate::core::fresh_primed(&c, used);
    }
    used.insert(c.clone());
    c
}

fn expand(x: &Formula, a: &Chan, b: &Chan, used: &mut BTreeSet<Chan>) -> Term {
    match x {
        Formula::Atom(_) => Term::Id(a.clone(), b.clone()),
        Formula::Sum(ps) => Term::Case {
            chan: a.clone(),
            branches: ps
                .iter()
                .map(|(t, y)| {
                    (t.clone(), Term::Select { chan: b.clone(), tag: t.clone(), body: Box::new(expand(y, a, b, used)) })
                })
                .collect(),
            ctx: None,
        },
        Formula::Prod(ps) => Term::Case {
            chan: b.clone(),
            branches: ps
                .iter()
                .map(|(t, y)| {
                    (t.clone(), Term::Select { chan: a.clone(), tag: t.clone(), body: Box::new(expand(y, a, b, used)) })
                })
                .collect(),
            ctx: None,
        },
        // split the side holding the tensor (domain) or par (codomain),
        // then fork the other one, one identity per component
        Formula::Tensor(ps) | Formula::Par(ps) => {
            let (split, fork) = if matches!(x, Formula::Tensor(_)) { (a, b) } else { (b, a) };
            let sp: Vec<Chan> = (1..=ps.len()).map(|i| fresh(split, i, used)).collect();
            let fp: Vec<Chan> = (1..=ps.len()).map(|i| fresh(fork, i, used)).collect();
            let arms = ps
                .iter()
                .enumerate()
                .map(|(i, (_, y))| {
                    let (ai, bi) = if split == a { (&sp[i], &fp[i]) } else { (&fp[i], &sp[i]) };
                    Arm { part: fp[i].clone(), owns: [sp[i].clone()].into(), body: expand(y, ai, bi, used) }
                })
                .collect();
            Term::Split {
                chan: split.clone(),
                parts: sp,
                body: Box::new(Term::Fork { chan: fork.clone(), arms }),
            }
        }
    }
}

/// The expanded identity `a:X |- b:X`, decomposing `X` all the way to atoms.
pub fn identity_term(x: &Formula, a: &Chan, b: &Chan) -> TypedTerm {
    assert_ne!(a, b, "identity needs two distinct channels");
    let mut used: BTreeSet<Chan> = [a.clone(), b.clone()].into();
    let t = expand(x, a, b, &mut used);
    let mut seq = Sequent::empty();
    seq.dom.insert(a.clone(), x.clone());
    seq.cod.insert(b.clone(), x.clone());
    check_arc(&t, &seq, Arc::new(Signature::empty())).expect("expanded identity checks")
}
