//! Canonical representatives and class keys. A key ignores bound names,
//! case branch order and identity orientation, and reads a cluster of cuts
//! as a wiring graph: leaves joined by cut channels, up to isomorphism.

use std::collections::{BTreeSet, HashMap};

use crate::checker::TypedTerm;
use crate::core::{Chan, Side, Term};

/// The term with identities written domain end first, case branches sorted
/// by tag and bound names renumbered.
pub fn representative(t: &TypedTerm) -> Term {
    fn go(t: &Term, tt: &TypedTerm, path: &mut Vec<usize>) -> Term {
        match t {
            Term::Id(a, b) => {
                if tt.side_at(path, a) == Some(Side::Cod) {
                    Term::Id(b.clone(), a.clone())
                } else {
                    t.clone()
                }
            }
            Term::Case { chan, branches, ctx } => {
                let mut bs: Vec<(crate::core::Tag, Term)> = branches
                    .iter()
                    .enumerate()
                    .map(|(i, (tag, b))| {
                        path.push(i);
                        let b = go(b, tt, path);
                        path.pop();
                        (tag.clone(), b)
                    })
                    .collect();
                bs.sort_by(|x, y| x.0.cmp(&y.0));
                Term::Case { chan: chan.clone(), branches: bs, ctx: ctx.clone() }
            }
            _ => {
                let mut out = t.clone();
                let kids: Vec<Term> = t
                    .children()
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| {
                        path.push(i);
                        let c = go(c, tt, path);
                        path.pop();
                        c
                    })
                    .collect();
                for (slot, k) in out.children_mut().into_iter().zip(kids) {
                    *slot = k;
                }
                out
            }
        }
    }
    go(&t.term, t, &mut Vec::new()).canonicalize()
}

/// Class key of a representative.
pub fn class_key(t: &Term) -> String {
    let mut k = Keyer::new(t);
    let mut out = String::new();
    k.term(t, &mut out);
    out
}

#[derive(Clone)]
struct Keyer {
    env: HashMap<Chan, String>,
    next: usize,
    probe: Option<Vec<Chan>>,
}

impl Keyer {
    fn new(t: &Term) -> Self {
        let env = t.free_channels().unwrap_or_default().into_iter().map(|c| {
            let l = format!("${c}");
            (c, l)
        });
        Keyer { env: env.collect(), next: 0, probe: None }
    }

    fn name(&mut self, c: &Chan) -> String {
        if let Some(l) = self.env.get(c) {
            return l.clone();
        }
        if let Some(p) = &mut self.probe {
            if !p.contains(c) {
                p.push(c.clone());
            }
            return "?".into();
        }
        format!("${c}")
    }

    fn bind(&mut self, c: &Chan) -> (String, Option<String>) {
        let l = format!("#{}", self.next);
        self.next += 1;
        let old = self.env.insert(c.clone(), l.clone());
        (l, old)
    }

    fn unbind(&mut self, c: &Chan, old: Option<String>) {
        match old {
            Some(o) => {
                self.env.insert(c.clone(), o);
            }
            None => {
                self.env.remove(c);
            }
        }
    }

    fn term(&mut self, t: &Term, out: &mut String) {
        match t {
            Term::Id(a, b) => {
                let (a, b) = (self.name(a), self.name(b));
                out.push_str(&format!("{a}={b}"));
            }
            Term::Axiom { name, ins, outs } => {
                let ins: Vec<String> = ins.iter().map(|c| self.name(c)).collect();
                let outs: Vec<String> = outs.iter().map(|c| self.name(c)).collect();
                out.push_str(&format!("{name}({};{})", ins.join(","), outs.join(",")));
            }
            Term::Case { chan, branches, .. } => {
                let c = self.name(chan);
                out.push_str(&format!("{c}{{"));
                let mut bs: Vec<&(crate::core::Tag, Term)> = branches.iter().collect();
                bs.sort_by(|x, y| x.0.cmp(&y.0));
                for (tag, b) in bs {
                    out.push_str(&format!("{tag}:"));
                    self.term(b, out);
                    out.push('|');
                }
                out.push('}');
            }
            Term::Select { chan, tag, body } => {
                let c = self.name(chan);
                out.push_str(&format!("{c}[{tag}]."));
                self.term(body, out);
            }
            Term::Split { chan, parts, body } => {
                let c = self.name(chan);
                let bound: Vec<(String, Option<String>)> = parts.iter().map(|p| self.bind(p)).collect();
                let names: Vec<&str> = bound.iter().map(|(l, _)| l.as_str()).collect();
                out.push_str(&format!("{c}<({})>", names.join(",")));
                self.term(body, out);
                for (p, (_, old)) in parts.iter().zip(bound).rev() {
                    self.unbind(p, old);
                }
            }
            Term::Fork { chan, arms } => {
                let c = self.name(chan);
                out.push_str(&format!("{c}<"));
                for a in arms {
                    let mut owns: Vec<String> = a.owns.iter().map(|o| self.name(o)).collect();
                    owns.sort();
                    let (l, old) = self.bind(&a.part);
                    out.push_str(&format!("{l}|{}:", owns.join(",")));
                    self.term(&a.body, out);
                    out.push(';');
                    self.unbind(&a.part, old);
                }
                out.push('>');
            }
            Term::Cut { .. } => self.cluster(t, out),
        }
    }

    /// A maximal block of cuts, keyed by walking its wiring from the leaf
    /// holding the least external port.
    fn cluster(&mut self, t: &Term, out: &mut String) {
        let mut leaves = Vec::new();
        let mut cuts = Vec::new();
        flatten(t, &mut leaves, &mut cuts);
        let cutset: BTreeSet<Chan> = cuts.iter().cloned().collect();
        // cut channels of each leaf, in a name-independent order
        let ports: Vec<Vec<Chan>> = leaves
            .iter()
            .map(|leaf| match leaf {
                Term::Axiom { ins, outs, .. } => ins.iter().chain(outs).filter(|c| cutset.contains(*c)).cloned().collect(),
                _ => {
                    let mut probe = self.clone();
                    for c in &cutset {
                        probe.env.remove(c);
                    }
                    probe.probe = Some(Vec::new());
                    probe.term(leaf, &mut String::new());
                    probe.probe.unwrap().into_iter().filter(|c| cutset.contains(c)).collect()
                }
            })
            .collect();
        let externals: Vec<Option<String>> = leaves
            .iter()
            .map(|leaf| {
                let free = leaf.free_channels().unwrap_or_default();
                free.iter().filter(|c| !cutset.contains(*c)).map(|c| self.name(c)).min()
            })
            .collect();
        let owner = |c: &Chan, not: usize| ports.iter().enumerate().position(|(i, p)| i != not && p.contains(c));
        let walk = |k: &mut Keyer, start: usize| -> String {
            let mut order = vec![start];
            let mut seen = vec![false; leaves.len()];
            seen[start] = true;
            let mut bound = Vec::new();
            let mut i = 0;
            while i < order.len() {
                let l = order[i];
                for c in &ports[l] {
                    if bound.iter().any(|(b, _): &(Chan, Option<String>)| b == c) {
                        continue;
                    }
                    let (_, old) = k.bind(c);
                    bound.push((c.clone(), old));
                    if let Some(o) = owner(c, l) {
                        if !seen[o] {
                            seen[o] = true;
                            order.push(o);
                        }
                    }
                }
                i += 1;
            }
            let mut s = String::from("cut(");
            for &l in &order {
                k.term(leaves[l], &mut s);
                s.push(';');
            }
            s.push(')');
            for (c, old) in bound.into_iter().rev() {
                k.unbind(&c, old);
            }
            s
        };
        let first = externals.iter().enumerate().filter_map(|(i, e)| e.clone().map(|e| (e, i))).min();
        let s = match first {
            Some((_, start)) => walk(self, start),
            None => {
                let mut best: Option<(String, Keyer)> = None;
                for start in 0..leaves.len() {
                    let mut k = self.clone();
                    let s = walk(&mut k, start);
                    if best.as_ref().is_none_or(|(b, _)| s < *b) {
                        best = Some((s, k));
                    }
                }
                let (s, k) = best.expect("a cut has leaves");
                self.next = k.next;
                s
            }
        };
        out.push_str(&s);
    }
}

fn flatten<'t>(t: &'t Term, leaves: &mut Vec<&'t Term>, cuts: &mut Vec<Chan>) {
    match t {
        Term::Cut { chan, left, right, .. } => {
            cuts.push(chan.clone());
            flatten(left, leaves, cuts);
            flatten(right, leaves, cuts);
        }
        _ => leaves.push(t),
    }
}
