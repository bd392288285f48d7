//! Inference of an unannotated cut formula from how either side uses the
//! cut channel.

use std::collections::{BTreeMap, BTreeSet};

use crate::core::{Chan, Formula, Sequent, Side, Signature, Term};

type Env = BTreeMap<Chan, (Side, Formula)>;

fn env_of(s: &Sequent) -> Env {
    s.iter().map(|(side, c, x)| (c.clone(), (side, x.clone()))).collect()
}

fn free_in(t: &Term, c: &Chan) -> bool {
    t.free_info().map(|(s, _)| s.contains(c)).unwrap_or(false)
}

pub(super) fn cut_formula(
    sig: &Signature,
    left: &Term,
    ls: &Sequent,
    right: &Term,
    rs: &Sequent,
    chan: &Chan,
) -> Option<Formula> {
    let x = synth(sig, left, &env_of(ls), chan, Side::Cod).or_else(|| synth(sig, right, &env_of(rs), chan, Side::Dom))?;
    let mut taken: BTreeSet<Chan> = ls.channels();
    taken.extend(rs.channels());
    taken.extend(left.all_names());
    taken.extend(right.all_names());
    for (_, _, y) in ls.iter().chain(rs.iter()) {
        taken.extend(y.nested_channels());
    }
    taken.insert(chan.clone());
    Some(x.relabel(chan, &mut taken))
}

fn build(tensorish: bool, parts: Vec<(Chan, Formula)>) -> Formula {
    if tensorish {
        Formula::Tensor(parts)
    } else {
        Formula::Par(parts)
    }
}

/// The type of `c`, which sits on `side` of `t`'s sequent, as far as `t`
/// determines it.
fn synth(sig: &Signature, t: &Term, env: &Env, c: &Chan, side: Side) -> Option<Formula> {
    match t {
        Term::Id(a, b) => {
            let other = if a == c {
                b
            } else if b == c {
                a
            } else {
                return None;
            };
            env.get(other).map(|(_, x)| x.clone())
        }
        Term::Axiom { name, ins, outs } => {
            let ty = sig.axiom(name)?;
            if let Some(i) = ins.iter().position(|x| x == c) {
                return ty.ins.get(i).cloned();
            }
            outs.iter().position(|x| x == c).and_then(|i| ty.outs.get(i).cloned())
        }
        Term::Case { chan, branches, .. } if chan == c => {
            let mut parts = Vec::new();
            for (tag, b) in branches {
                parts.push((tag.clone(), synth(sig, b, env, c, side)?));
            }
            Some(if side == Side::Dom { Formula::Sum(parts) } else { Formula::Prod(parts) })
        }
        Term::Select { chan, .. } if chan == c => None,
        Term::Split { chan, parts, body } if chan == c => {
            let mut comps = Vec::new();
            for p in parts {
                comps.push((p.clone(), synth(sig, body, env, p, side)?));
            }
            Some(build(side == Side::Dom, comps))
        }
        Term::Fork { chan, arms } if chan == c => {
            let mut comps = Vec::new();
            for a in arms {
                comps.push((a.part.clone(), synth(sig, &a.body, env, &a.part, side)?));
            }
            Some(build(side == Side::Cod, comps))
        }
        Term::Case { chan, branches, .. } => {
            let known = env.get(chan).cloned();
            for (tag, b) in branches {
                if !free_in(b, c) {
                    continue;
                }
                let mut e = env.clone();
                match known.as_ref().and_then(|(s, x)| Some((*s, x.component_for_tag(tag)?.clone()))) {
                    Some(k) => {
                        e.insert(chan.clone(), k);
                    }
                    None => {
                        e.remove(chan);
                    }
                }
                if let Some(x) = synth(sig, b, &e, c, side) {
                    return Some(x);
                }
            }
            None
        }
        Term::Select { chan, tag, body } => {
            let mut e = env.clone();
            match env.get(chan).and_then(|(s, x)| Some((*s, x.component_for_tag(tag)?.clone()))) {
                Some(k) => {
                    e.insert(chan.clone(), k);
                }
                None => {
                    e.remove(chan);
                }
            }
            synth(sig, body, &e, c, side)
        }
        Term::Split { chan, parts, body } => {
            let mut e = env.clone();
            if let Some((s, x)) = e.remove(chan) {
                if let Some(comps) = x.components() {
                    for (p, (_, y)) in parts.iter().zip(comps) {
                        e.insert(p.clone(), (s, y.clone()));
                    }
                }
            }
            synth(sig, body, &e, c, side)
        }
        Term::Fork { chan, arms } => {
            let known = env.get(chan).cloned();
            let (i, a) = arms.iter().enumerate().find(|(_, a)| a.owns.contains(c))?;
            let mut e: Env = env.iter().filter(|(k, _)| a.owns.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect();
            if let Some((s, x)) = known {
                if let Some((_, y)) = x.components().and_then(|cs| cs.get(i)) {
                    e.insert(a.part.clone(), (s, y.clone()));
                }
            }
            synth(sig, &a.body, &e, c, side)
        }
        Term::Cut { chan, ty, left, right } => {
            let in_left = free_in(left, c);
            let z = ty
                .clone()
                .or_else(|| synth(sig, right, env, chan, Side::Dom))
                .or_else(|| synth(sig, left, env, chan, Side::Cod));
            let mut e = env.clone();
            let inner_side = if in_left { Side::Cod } else { Side::Dom };
            match z {
                Some(z) => {
                    e.insert(chan.clone(), (inner_side, z));
                }
                None => {
                    e.remove(chan);
                }
            }
            synth(sig, if in_left { left } else { right }, &e, c, side)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_formula, parse_sequent};

    #[test]
    fn through_identities_and_axioms() {
        let mut sig = Signature::empty();
        sig.add_atom("A");
        sig.add_axiom("f", vec![], vec![parse_formula("A").unwrap()]).unwrap();
        let left = Term::axiom("f", &[], &["g"]);
        let right = Term::id("g", "b");
        let rs = parse_sequent("|- b:A").unwrap();
        let x = cut_formula(&sig, &left, &Sequent::empty(), &right, &rs, &"g".into()).unwrap();
        assert_eq!(x, Formula::atom("A"));
    }

    #[test]
    fn through_a_split_of_the_cut_channel() {
        let sig = Signature::empty();
        let ls = parse_sequent("x:A, y:B |-").unwrap();
        let left = Term::fork("g", vec![("p", &["x"], Term::id("x", "p")), ("q", &["y"], Term::id("y", "q"))]);
        let right = Term::split("g", &["u", "v"], Term::Axiom { name: "h".into(), ins: vec!["u".into(), "v".into()], outs: vec![] });
        let x = cut_formula(&sig, &left, &ls, &right, &Sequent::empty(), &"g".into()).unwrap();
        assert_eq!(x.type_key(), "*(A,B)");
    }

    #[test]
    fn selects_do_not_fix_the_type() {
        let sig = Signature::empty();
        let ls = parse_sequent("x:A |-").unwrap();
        let left = Term::select("g", "a", Term::id("x", "g"));
        let right = Term::select("g", "a", Term::id("g", "b"));
        assert!(cut_formula(&sig, &left, &ls, &right, &parse_sequent("|- b:A").unwrap(), &"g".into()).is_none());
    }
}
