//! Executable metatheory: critical-pair diagrams, the polycategory laws,
//! the additive and representability bijections and the injection
//! translation, each checked on concrete instances through `decide`.

mod diagrams;
mod instances;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::checker::{check_arc, compose, identity_term, sequent_from, ComposeError, TypedTerm};
use crate::core::{fresh_primed, Arm, Chan, Formula, Side, Tag, Term};
use crate::equiv::{decide, DecideError, DEFAULT_BUDGET};

pub use diagrams::{check_diagrams, enumerate_divergences, resolve, Arrow, DiagramReport, DiagramVerdict, Divergence, Move};
pub use instances::{
    assoc_instance, exhaustive_corpus, identity_instance, injection_instance, interchange_instance, poly_instance, repr_instance, run_law,
    sweep, Corpus, Law, LawReport, Verdict, DEFAULT_MAX_FORMULA,
};

#[derive(Debug, Error)]
pub enum LawError {
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error("instance has the wrong shape: {0}")]
    Shape(String),
}

fn shape(msg: impl Into<String>) -> LawError {
    LawError::Shape(msg.into())
}

fn equivalent(a: &TypedTerm, b: &TypedTerm) -> Result<bool, LawError> {
    Ok(decide(a, b, DEFAULT_BUDGET)?.is_equivalent())
}

fn names(ts: &[&TypedTerm]) -> BTreeSet<Chan> {
    let mut used = BTreeSet::new();
    for t in ts {
        used.extend(t.term.all_names());
        used.extend(t.seq.channels());
        for (_, _, x) in t.seq.iter() {
            used.extend(x.nested_channels());
        }
    }
    used
}

/// `t` with free channels renamed, in its sequent too.
fn renamed(t: &TypedTerm, m: &BTreeMap<Chan, Chan>) -> TypedTerm {
    let term = t.term.rename_free(m, &BTreeSet::new());
    let seq = t.seq.rename(|c| m.get(c).cloned().unwrap_or_else(|| c.clone()));
    check_arc(&term, &seq, t.sig.clone()).expect("renaming free channels keeps typing")
}

fn one(from: &Chan, to: &Chan) -> BTreeMap<Chan, Chan> {
    [(from.clone(), to.clone())].into()
}

/// Composing with an identity on `gamma`, on whichever side `gamma` is,
/// gives back `f`.
pub fn check_identity_law(f: &TypedTerm, gamma: &Chan) -> Result<bool, LawError> {
    let (side, x) = f.seq.get(gamma).ok_or_else(|| shape(format!("no channel {gamma}")))?;
    let fresh = fresh_primed(gamma, &names(&[f]));
    let composite = match side {
        Side::Cod => compose(f, &identity_term(x, gamma, &fresh), gamma)?,
        Side::Dom => compose(&identity_term(x, &fresh, gamma), f, gamma)?,
    };
    equivalent(&renamed(&composite, &one(&fresh, gamma)), f)
}

/// `(f ;gamma g) ;delta h` against `f ;gamma (g ;delta h)`.
pub fn check_assoc(f: &TypedTerm, g: &TypedTerm, h: &TypedTerm, gamma: &Chan, delta: &Chan) -> Result<bool, LawError> {
    let lhs = compose(&compose(f, g, gamma)?, h, delta)?;
    let rhs = compose(f, &compose(g, h, delta)?, gamma)?;
    equivalent(&lhs, &rhs)
}

/// With `gamma` and `delta` both in the codomain of `f`,
/// `(f ;gamma g) ;delta h` against `(f ;delta h) ;gamma g`; with both in the
/// domain, `h ;delta (g ;gamma f)` against `g ;gamma (h ;delta f)`.
pub fn check_interchange(f: &TypedTerm, g: &TypedTerm, h: &TypedTerm, gamma: &Chan, delta: &Chan) -> Result<bool, LawError> {
    let sides = (f.seq.get(gamma).map(|p| p.0), f.seq.get(delta).map(|p| p.0));
    let (lhs, rhs) = match sides {
        (Some(Side::Cod), Some(Side::Cod)) => {
            (compose(&compose(f, g, gamma)?, h, delta)?, compose(&compose(f, h, delta)?, g, gamma)?)
        }
        (Some(Side::Dom), Some(Side::Dom)) => {
            (compose(h, &compose(g, f, gamma)?, delta)?, compose(g, &compose(h, f, delta)?, gamma)?)
        }
        _ => return Err(shape("interchange needs both channels on one side of f")),
    };
    equivalent(&lhs, &rhs)
}

/// The injection `a:X_k |- alpha:{..}` or projection `alpha:[..] |- a:X_k`.
fn injection(alpha: &Chan, side: Side, whole: &Formula, tag: &Tag, x: &Formula, a: &Chan) -> TypedTerm {
    let (id, seq) = match side {
        Side::Cod => (identity_term(x, a, alpha), sequent_from(vec![(Side::Dom, a.clone(), x.clone()), (Side::Cod, alpha.clone(), whole.clone())])),
        Side::Dom => (identity_term(x, alpha, a), sequent_from(vec![(Side::Dom, alpha.clone(), whole.clone()), (Side::Cod, a.clone(), x.clone())])),
    };
    let term = Term::Select { chan: alpha.clone(), tag: tag.clone(), body: Box::new(id.term) };
    check_arc(&term, &seq, id.sig.clone()).expect("injections check")
}

/// The sum bijection on `alpha`, a sum in the domain of `t` or a product in
/// its codomain. `s` holds one term per component, on `t`'s sequent with
/// `alpha` narrowed to that component. Checks that casing then projecting
/// gives each `s_k` back, and projecting then casing gives `t` back.
pub fn check_poly_sum(t: &TypedTerm, alpha: &Chan, s: &[TypedTerm]) -> Result<bool, LawError> {
    let (side, whole) = t.seq.get(alpha).ok_or_else(|| shape(format!("no channel {alpha}")))?;
    let parts = match (side, whole) {
        (Side::Dom, Formula::Sum(ps)) | (Side::Cod, Formula::Prod(ps)) => ps.clone(),
        _ => return Err(shape(format!("{alpha} is not a sum on the left or a product on the right"))),
    };
    if parts.len() != s.len() {
        return Err(shape("one term per component"));
    }
    let psi = |fs: Vec<Term>| -> TypedTerm {
        let branches: Vec<(Tag, Term)> = parts.iter().map(|(tag, _)| tag.clone()).zip(fs).collect();
        let ctx = branches.is_empty().then(|| t.seq.clone());
        let term = Term::Case { chan: alpha.clone(), branches, ctx };
        check_arc(&term, &t.seq, t.sig.clone()).expect("cotuples check")
    };
    let fresh = fresh_primed(alpha, &names(&[t]));
    let phi = |u: &TypedTerm, k: usize| -> Result<TypedTerm, LawError> {
        let (tag, x) = &parts[k];
        let inj = injection(alpha, side.flip(), whole, tag, x, &fresh);
        let composite = match side {
            Side::Dom => compose(&inj, u, alpha)?,
            Side::Cod => compose(u, &inj, alpha)?,
        };
        Ok(renamed(&composite, &one(&fresh, alpha)))
    };
    let cotuple = psi(s.iter().map(|x| x.term.clone()).collect());
    for (k, sk) in s.iter().enumerate() {
        if !equivalent(&phi(&cotuple, k)?, sk)? {
            return Ok(false);
        }
    }
    let projections = (0..parts.len()).map(|k| phi(t, k).map(|u| u.term)).collect::<Result<Vec<_>, _>>()?;
    equivalent(&psi(projections), t)
}

/// The tensor bijection on `alpha`, a tensor in the domain of `t` or a par
/// in its codomain. `s` is on `t`'s sequent with `alpha` replaced by its
/// components. Checks that splitting then cutting with the bundling fork
/// gives `s` back, and the other way round gives `t` back.
pub fn check_representability(t: &TypedTerm, alpha: &Chan, s: &TypedTerm) -> Result<bool, LawError> {
    let (side, whole) = t.seq.get(alpha).ok_or_else(|| shape(format!("no channel {alpha}")))?;
    let parts = match (side, whole) {
        (Side::Dom, Formula::Tensor(ps)) | (Side::Cod, Formula::Par(ps)) => ps.clone(),
        _ => return Err(shape(format!("{alpha} is not a tensor on the left or a par on the right"))),
    };
    let labels: Vec<Chan> = parts.iter().map(|(c, _)| c.clone()).collect();
    let split = Term::Split { chan: alpha.clone(), parts: labels.clone(), body: Box::new(s.term.clone()) };
    let psi_s = check_arc(&split, &t.seq, t.sig.clone()).map_err(|e| shape(e.to_string()))?;

    let mut used = names(&[t, s]);
    let outer: Vec<Chan> = labels
        .iter()
        .map(|l| {
            let n = fresh_primed(&Chan::from(format!("{l}o").as_str()), &used);
            used.insert(n.clone());
            n
        })
        .collect();
    let arms: Vec<Arm> = parts
        .iter()
        .zip(&outer)
        .map(|((l, x), o)| {
            let body = match side {
                Side::Dom => identity_term(x, o, l).term,
                Side::Cod => identity_term(x, l, o).term,
            };
            Arm { part: l.clone(), owns: [o.clone()].into(), body }
        })
        .collect();
    let mut bundle_seq: Vec<(Side, Chan, Formula)> = parts.iter().zip(&outer).map(|((_, x), o)| (side, o.clone(), x.clone())).collect();
    bundle_seq.push((side.flip(), alpha.clone(), whole.clone()));
    let bundle = check_arc(&Term::Fork { chan: alpha.clone(), arms }, &sequent_from(bundle_seq), Arc::new(Default::default()))
        .expect("bundling forks check");
    let phi = |u: &TypedTerm| -> Result<TypedTerm, LawError> {
        let composite = match side {
            Side::Dom => compose(&bundle, u, alpha)?,
            Side::Cod => compose(u, &bundle, alpha)?,
        };
        let back: BTreeMap<Chan, Chan> = outer.iter().cloned().zip(labels.iter().cloned()).collect();
        Ok(renamed(&composite, &back))
    };
    if !equivalent(&phi(&psi_s)?, s)? {
        return Ok(false);
    }
    let phi_t = phi(t)?;
    let split = Term::Split { chan: alpha.clone(), parts: labels, body: Box::new(phi_t.term) };
    let psi_phi_t = check_arc(&split, &t.seq, t.sig.clone()).map_err(|e| shape(e.to_string()))?;
    equivalent(&psi_phi_t, t)
}

/// `alpha[tag]. f` against `f` cut with the injection into `whole`, for
/// `alpha` a sum in the codomain of the result (or a product in the domain).
pub fn check_injection(f: &TypedTerm, alpha: &Chan, whole: &Formula, tag: &Tag) -> Result<bool, LawError> {
    let (side, x) = f.seq.get(alpha).ok_or_else(|| shape(format!("no channel {alpha}")))?;
    match (side, whole) {
        (Side::Cod, Formula::Sum(_)) | (Side::Dom, Formula::Prod(_)) => {}
        _ => return Err(shape("injections go into sums on the right or products on the left")),
    }
    if whole.component_for_tag(tag).is_none_or(|y| !y.same_type(x)) {
        return Err(shape(format!("{tag} does not pick out the type of {alpha}")));
    }
    let mut seq = f.seq.clone();
    seq.replace(alpha, whole.clone());
    let select = Term::Select { chan: alpha.clone(), tag: tag.clone(), body: Box::new(f.term.clone()) };
    let direct = check_arc(&select, &seq, f.sig.clone()).map_err(|e| shape(e.to_string()))?;
    let fresh = fresh_primed(alpha, &names(&[f]));
    let inj = injection(&fresh, side, whole, tag, x, alpha);
    let composite = match side {
        Side::Cod => compose(f, &inj, alpha)?,
        Side::Dom => compose(&inj, f, alpha)?,
    };
    equivalent(&direct, &renamed(&composite, &one(&fresh, alpha)))
}

#[cfg(test)]
mod tests;
