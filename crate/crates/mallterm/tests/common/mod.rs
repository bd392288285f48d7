//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use mallterm::checker::TypedTerm;
use mallterm::equiv::{apply_conversion, find_conversions};
use mallterm::rewriter::{apply, find_redexes, normal_form};
use mallterm::surface::{print_term, SyntaxKind};

pub fn key(t: &TypedTerm) -> String {
    print_term(&t.term.canonicalize(), SyntaxKind::TermCalc)
}

/// Everything reachable from the normal form of `t` by single conversions
/// in either direction, renormalizing after each one. `None` past `cap`.
pub fn closure(t: &TypedTerm, cap: usize) -> Option<HashSet<String>> {
    let start = normal_form(t, 1_000_000).ok()?;
    let mut seen = HashSet::from([key(&start)]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for c in find_conversions(&u) {
            let Ok(v) = apply_conversion(&u, &c) else { continue };
            let w = normal_form(&v, 1_000_000).ok()?;
            if seen.insert(key(&w)) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(w);
            }
        }
    }
    Some(seen)
}

/// Every normal form reachable by some reduction sequence, deduplicated by
/// exact term.
pub fn all_normal_forms(t: &TypedTerm, cap: usize) -> Vec<TypedTerm> {
    let mut seen = HashSet::from([key(t)]);
    let mut queue = VecDeque::from([t.clone()]);
    let mut out = Vec::new();
    while let Some(u) = queue.pop_front() {
        let rs = find_redexes(&u);
        if rs.is_empty() {
            out.push(u);
            continue;
        }
        for r in rs {
            let v = apply(&u, &r).expect("found redexes apply");
            if seen.len() < cap && seen.insert(key(&v)) {
                queue.push_back(v);
            }
        }
    }
    out
}
