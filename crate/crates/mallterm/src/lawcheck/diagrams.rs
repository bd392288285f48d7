//! Critical pairs: one-step divergences at overlapping positions and their
//! convergences, with the arrow measure before and after.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::checker::TypedTerm;
use crate::equiv::{apply_conversion, decide, find_conversions, representative, Chain, Conversion, EquivCertificate};
use crate::measure::{arrow_measure, cut_bag, ArrowKind, CutBag};
use crate::rewriter::{apply, choose_redex, find_redexes, normalize, Redex, RuleId};
use crate::surface::{print_term, SyntaxKind};

/// One arrow out of the apex.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Move {
    Reduction(Redex),
    Conversion(Conversion),
}

impl Move {
    pub fn rule(&self) -> RuleId {
        match self {
            Move::Reduction(r) => r.rule,
            Move::Conversion(c) => c.rule,
        }
    }
}

/// Two legal steps out of one term. The left step is always a reduction.
#[derive(Clone, Debug)]
pub struct Divergence {
    pub apex: TypedTerm,
    pub left: (Redex, TypedTerm),
    pub right: (Move, TypedTerm),
}

impl Divergence {
    pub fn describe(&self) -> String {
        format!("{} / {} on {}", self.left.0.rule, self.right.0.rule(), self.apex.print(SyntaxKind::TermCalc))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Arrow {
    pub rule: Option<RuleId>,
    pub kind: ArrowKind,
    pub bag: CutBag,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagramVerdict {
    Resolved,
    /// The converted side is already reduced and the two results differ by
    /// conversions alone, so no convergence with a reduction under the
    /// conversion exists. Happens when a nullary conversion erases the cut.
    ConversionsOnly,
    Unresolved,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagramReport {
    pub divergence: String,
    pub verdict: DiagramVerdict,
    /// Reductions from the left result, then from the right result, then
    /// the conversions joining their ends.
    pub left: Vec<Arrow>,
    pub right: Vec<Arrow>,
    pub conversions: Vec<Arrow>,
    /// Arrow bags of the divergence and of the convergence, largest first.
    pub before: Vec<CutBag>,
    pub after: Vec<CutBag>,
    pub decreased: bool,
}

fn overlap(p: &[usize], q: &[usize]) -> bool {
    p.starts_with(q) || q.starts_with(p)
}

/// Every reduction/reduction and reduction/conversion pair at overlapping
/// positions.
pub fn enumerate_divergences(t: &TypedTerm) -> Vec<Divergence> {
    let redexes = find_redexes(t);
    let conversions = find_conversions(t);
    let mut out = Vec::new();
    for (i, r) in redexes.iter().enumerate() {
        let left = (r.clone(), apply(t, r).expect("found redexes apply"));
        for s in &redexes[i + 1..] {
            if overlap(&r.path, &s.path) {
                let right = apply(t, s).expect("found redexes apply");
                out.push(Divergence { apex: t.clone(), left: left.clone(), right: (Move::Reduction(s.clone()), right) });
            }
        }
        for c in &conversions {
            if overlap(&r.path, &c.path) {
                let right = apply_conversion(t, c).expect("found conversions apply");
                out.push(Divergence { apex: t.clone(), left: left.clone(), right: (Move::Conversion(c.clone()), right) });
            }
        }
    }
    out
}

/// Most terms kept per side when exploring reductions.
const REACH_CAP: usize = 2_000;
const DECIDE_BUDGET: usize = 20_000;
const NORMALIZE_STEPS: usize = 100_000;

/// Exact identity of a term up to bound names. Class keys identify cut
/// blocks by their wiring, which only means something on normal forms.
fn exact(t: &TypedTerm) -> String {
    print_term(&representative(t).canonicalize(), SyntaxKind::TermCalc)
}

/// Terms reachable by at most `depth` reductions, each with the arrows that
/// led there. Shortest paths first.
fn reachable(t: &TypedTerm, depth: usize) -> Vec<(TypedTerm, Vec<Arrow>)> {
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(t.clone(), Vec::<Arrow>::new())]);
    seen.insert(exact(t), ());
    while let Some((u, path)) = queue.pop_front() {
        if path.len() < depth && out.len() < REACH_CAP {
            for r in find_redexes(&u) {
                let v = apply(&u, &r).expect("found redexes apply");
                let key = exact(&v);
                if seen.insert(key, ()).is_none() {
                    let mut p = path.clone();
                    p.push(Arrow { rule: Some(r.rule), kind: ArrowKind::Reduction, bag: arrow_measure(&u.term, &v.term, ArrowKind::Reduction).bag });
                    queue.push_back((v, p));
                }
            }
        }
        out.push((u, path));
    }
    out
}

fn chain_arrows(chain: &Chain) -> Vec<Arrow> {
    let mut prev = chain.start.clone();
    let mut arrows = Vec::new();
    for s in &chain.steps {
        if let Some(c) = &s.conversion {
            let bag = cut_bag(&prev).max(cut_bag(&s.term));
            arrows.push(Arrow { rule: Some(c.rule), kind: ArrowKind::Conversion, bag });
        }
        prev = s.term.clone();
    }
    arrows
}

fn sorted(mut bags: Vec<CutBag>) -> Vec<CutBag> {
    bags.sort_by(|a, b| b.cmp(a));
    bags
}

/// Looks for a convergence within `depth` reductions per side, joined by
/// conversions, and picks the one of least measure.
pub fn resolve(d: &Divergence, depth: usize) -> DiagramReport {
    let apex = &d.apex.term;
    let right_kind = match d.right.0 {
        Move::Reduction(_) => ArrowKind::Reduction,
        Move::Conversion(_) => ArrowKind::Conversion,
    };
    let before = sorted(vec![
        arrow_measure(apex, &d.left.1.term, ArrowKind::Reduction).bag,
        arrow_measure(apex, &d.right.1.term, right_kind).bag,
    ]);
    let lefts = reachable(&d.left.1, depth);
    let mut rights = reachable(&d.right.1, depth);
    if right_kind == ArrowKind::Conversion {
        // the converted side must reduce at least once
        rights.retain(|(_, p)| !p.is_empty());
    }
    let mut best: Option<(Vec<CutBag>, Vec<Arrow>, Vec<Arrow>, Vec<Arrow>)> = None;
    let consider = |l: &Vec<Arrow>, r: &Vec<Arrow>, c: Vec<Arrow>, best: &mut Option<_>| {
        let after = sorted(l.iter().chain(r).chain(&c).map(|a| a.bag.clone()).collect());
        if best.as_ref().is_none_or(|(b, ..): &(Vec<CutBag>, _, _, _)| after < *b) {
            *best = Some((after, l.clone(), r.clone(), c));
        }
    };
    let rkeys: HashMap<String, Vec<usize>> = rights.iter().enumerate().fold(HashMap::new(), |mut m, (i, (u, _))| {
        m.entry(exact(u)).or_default().push(i);
        m
    });
    for (u, lp) in &lefts {
        if let Some(is) = rkeys.get(&exact(u)) {
            for &i in is {
                consider(lp, &rights[i].1, vec![], &mut best);
            }
        }
    }
    if best.is_none() {
        let normal = |v: &Vec<(TypedTerm, Vec<Arrow>)>| -> Vec<usize> {
            (0..v.len()).filter(|&i| choose_redex(&v[i].0.term).is_none()).collect()
        };
        for i in normal(&lefts) {
            for j in normal(&rights) {
                let Ok(EquivCertificate::Equivalent(chain)) = decide(&lefts[i].0, &rights[j].0, DECIDE_BUDGET) else { continue };
                consider(&lefts[i].1, &rights[j].1, chain_arrows(&chain), &mut best);
            }
        }
    }
    let mut conversions_only = None;
    if best.is_none() {
        // past the search bound: follow the strategy to the end on both sides
        let traced = |t: &TypedTerm| -> Option<(TypedTerm, Vec<Arrow>)> {
            let (nf, trace) = normalize(t, NORMALIZE_STEPS).ok()?;
            let mut prev = t.term.clone();
            let mut arrows = Vec::new();
            for s in &trace.steps {
                arrows.push(Arrow { rule: Some(s.redex.rule), kind: ArrowKind::Reduction, bag: arrow_measure(&prev, &s.result.term, ArrowKind::Reduction).bag });
                prev = s.result.term.clone();
            }
            Some((nf, arrows))
        };
        if let (Some((ln, lp)), Some((rn, rp))) = (traced(&d.left.1), traced(&d.right.1)) {
            if let Ok(EquivCertificate::Equivalent(chain)) = decide(&ln, &rn, DECIDE_BUDGET) {
                if right_kind == ArrowKind::Reduction || !rp.is_empty() {
                    consider(&lp, &rp, chain_arrows(&chain), &mut best);
                } else {
                    let mut only = None;
                    consider(&lp, &rp, chain_arrows(&chain), &mut only);
                    conversions_only = only;
                }
            }
        }
    }
    let divergence = d.describe();
    let verdict = if best.is_some() { DiagramVerdict::Resolved } else { DiagramVerdict::ConversionsOnly };
    match best.or(conversions_only) {
        Some((after, left, right, conversions)) => {
            let decreased = after < before;
            DiagramReport { divergence, verdict, left, right, conversions, before, after, decreased }
        }
        None => DiagramReport {
            divergence,
            verdict: DiagramVerdict::Unresolved,
            left: vec![],
            right: vec![],
            conversions: vec![],
            before,
            after: vec![],
            decreased: false,
        },
    }
}

/// Divergences of `t` that overlap, with their reports.
pub fn check_diagrams(t: &TypedTerm, depth: usize) -> Vec<DiagramReport> {
    enumerate_divergences(t).iter().map(|d| resolve(d, depth)).collect()
}
