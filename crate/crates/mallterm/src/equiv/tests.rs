use std::collections::BTreeSet;

use super::*;
use crate::checker::check;
use crate::core::Signature;
use crate::measure::cut_bag;
use crate::prover::{cut_free_proofs, sequents_up_to};
use crate::rewriter::{apply, find_redexes, RuleId, Variant};
use crate::surface::{parse_sequent, parse_signature, parse_term};

fn sig() -> Signature {
    parse_signature("atom A, B\naxiom f : -> A\naxiom h : A ->\naxiom m : A, A -> B").unwrap()
}

fn typed(t: &str, s: &str) -> TypedTerm {
    let term = parse_term(t, SyntaxKind::TermCalc).unwrap();
    check(&term, &parse_sequent(s).unwrap(), &sig()).unwrap()
}

fn rules(t: &TypedTerm) -> Vec<String> {
    find_conversions(t).iter().map(|c| c.rule.to_string()).collect()
}

const FLIP_SEQ: &str = "a:{l:A, r:A}, b:{l:A, r:A} |- c:B";
const FLIP: &str = "a{ l => b{ l => m(a, b; c) | r => m(a, b; c) } | r => b{ l => m(a, b; c) | r => m(a, b; c) } }";

#[test]
fn cotuple_swap_in_both_directions() {
    let t = typed(FLIP, FLIP_SEQ);
    let at_root: Vec<_> = find_conversions(&t).into_iter().filter(|c| c.path.is_empty()).collect();
    assert_eq!(at_root.len(), 2);
    assert!(at_root.iter().all(|c| c.rule == RuleId::standard(15)));
    let dirs: BTreeSet<_> = at_root.iter().map(|c| c.direction).collect();
    assert_eq!(dirs.len(), 2);
    let out = apply_conversion(&t, &at_root[0]).unwrap();
    let Term::Case { chan, .. } = &out.term else { panic!() };
    assert_eq!(chan.as_str(), "b");
}

#[test]
fn nullary_cotuple_emits_a_case() {
    let t = typed("a{}", "a:0, b:{l:A, r:A} |-");
    let found = find_conversions(&t);
    let c = found.iter().find(|c| c.rule.number == 15).expect("a (15) conversion");
    assert_eq!(c.rule.variant, Variant::EmptyI);
    let out = apply_conversion(&t, c).unwrap();
    let want = parse_term("b{ l => a{} | r => a{} }", SyntaxKind::TermCalc).unwrap();
    assert_eq!(out.term.erase_annotations(), want);
    // and back
    assert!(find_conversions(&out).iter().any(|d| class_key(&out.term.replace_at(&d.path, d.replacement.clone())) == class_key(&t.term)));
}

#[test]
fn blocking_case_has_no_split_fork_swap() {
    let t = typed("a<() => b<>>", "a:top |- b:top");
    assert!(!rules(&t).iter().any(|r| r.starts_with("(23")), "{:?}", rules(&t));
}

#[test]
fn cotuple_over_injection() {
    let t = typed("a{ l => b[l]. a == b | r => b[l]. a == b }", "a:{l:A, r:A} |- b:{l:A, r:B}");
    let c = find_conversions(&t).into_iter().find(|c| c.rule == RuleId::standard(16)).unwrap();
    assert_eq!(c.direction, Direction::Forward);
    let out = apply_conversion(&t, &c).unwrap();
    let want = parse_term("b[l]. a{ l => a == b | r => a == b }", SyntaxKind::TermCalc).unwrap();
    assert_eq!(out.term, want);
}

#[test]
fn nullary_injection_over_split() {
    let t = typed("x[a]. y<() => f(; x)>", "y:top |- x:{a:A}");
    let c = find_conversions(&t).into_iter().find(|c| c.rule.number == 20).unwrap();
    assert_eq!(c.rule.variant, Variant::EmptyJ);
    let out = apply_conversion(&t, &c).unwrap();
    let want = parse_term("y<() => x[a]. f(; x)>", SyntaxKind::TermCalc).unwrap();
    assert_eq!(out.term, want);
}

#[test]
fn foreign_conversion_is_rejected() {
    let t = typed(FLIP, FLIP_SEQ);
    let other = typed("a{ l => b[l]. a == b | r => b[l]. a == b }", "a:{l:A, r:A} |- b:{l:A, r:B}");
    let c = find_conversions(&other).remove(0);
    assert!(matches!(apply_conversion(&t, &c), Err(ConversionError::NotAConversion(_))));
}

#[test]
fn every_conversion_can_be_undone() {
    let cases = [
        (FLIP, FLIP_SEQ),
        ("a{ l => b[l]. a == b | r => b[l]. a == b }", "a:{l:A, r:A} |- b:{l:A, r:B}"),
        ("x[a]. y<() => f(; x)>", "y:top |- x:{a:A}"),
        ("a<(p, q) => b< u | {p} => p == u ; v | {q} => q == v >>", "a:A * A |- b:A * A"),
        ("a{}", "a:0, b:A * A, c:{l:A} |- d:top"),
    ];
    for (t, s) in cases {
        let t = typed(t, s);
        let home = class_key(&representative(&t));
        for c in find_conversions(&t) {
            let out = apply_conversion(&t, &c).unwrap();
            assert_eq!(out.seq, t.seq);
            assert_eq!(out.term.free_channels().unwrap(), t.term.free_channels().unwrap());
            let back = find_conversions(&out).into_iter().any(|d| {
                let u = apply_conversion(&out, &d).unwrap();
                class_key(&representative(&u)) == home
            });
            assert!(back, "{c} from {} has no inverse", t.print(SyntaxKind::TermCalc));
        }
    }
}

#[test]
fn class_of_an_identity_is_itself() {
    let t = typed("a == b", "a:A |- b:A");
    let class = equivalence_class(&t, DEFAULT_BUDGET).unwrap();
    assert!(class.complete);
    assert_eq!(class.members.len(), 1);
}

#[test]
fn class_of_nested_cotuples_is_the_flip() {
    let t = typed(FLIP, FLIP_SEQ);
    let class = equivalence_class(&t, DEFAULT_BUDGET).unwrap();
    assert!(class.complete);
    // oracle: the original and its flip, nothing else
    let flipped = typed("b{ l => a{ l => m(a, b; c) | r => m(a, b; c) } | r => a{ l => m(a, b; c) | r => m(a, b; c) } }", FLIP_SEQ);
    let want: BTreeSet<String> = [&t, &flipped].iter().map(|x| class_key(&representative(x))).collect();
    let got: BTreeSet<String> = class.members.iter().map(class_key).collect();
    assert_eq!(got, want);
}

#[test]
fn budget_is_reported() {
    let t = typed(FLIP, FLIP_SEQ);
    let class = equivalence_class(&t, 1).unwrap();
    assert!(!class.complete);
    let other = typed("b{ l => a{ l => m(a, b; c) | r => m(a, b; c) } | r => a{ l => m(a, b; c) | r => m(a, b; c) } }", FLIP_SEQ);
    assert!(matches!(decide(&t, &other, 1).unwrap(), EquivCertificate::Inconclusive { .. }));
    assert!(decide(&t, &other, 4).unwrap().is_equivalent());
}

/// The nullary conversion shapes over unit-only sequents.
fn nullary_shapes(max: usize) -> BTreeSet<String> {
    let empty = Signature::empty();
    let mut shapes = BTreeSet::new();
    for s in sequents_up_to(max, &[], 2) {
        let (proofs, _) = cut_free_proofs(&s, &empty, 5_000);
        for p in proofs {
            let t = check(&p, &s, &empty).unwrap();
            for c in find_conversions(&t) {
                if c.rule.variant != Variant::Standard {
                    shapes.insert(c.rule.to_string());
                }
            }
        }
    }
    shapes
}

#[test]
fn thirteen_nullary_conversions() {
    let shapes = nullary_shapes(5);
    assert_eq!(shapes.len(), 13, "{shapes:?}");
    let numbers: BTreeSet<String> = shapes.iter().map(|s| s[1..3].to_string()).collect();
    let want: BTreeSet<String> = ["15", "16", "17", "18", "20", "22", "23"].iter().map(|s| s.to_string()).collect();
    assert_eq!(numbers, want);
}

#[test]
fn standard_conversions_keep_the_cut_bag() {
    let cases = [
        ("cut g (f(; g), a{ l => x{ l => m(g, a; x) } })", "a:{l:A} |- x:[l:B]"),
        ("a<(p, q) => x[l]. cut g (m(p, q; g), g == x)>", "a:A * A |- x:{l:B}"),
    ];
    for (t, s) in cases {
        let t = typed(t, s);
        let found = find_conversions(&t);
        assert!(!found.is_empty());
        for c in found {
            assert_eq!(c.rule.variant, Variant::Standard);
            let out = apply_conversion(&t, &c).unwrap();
            assert_eq!(cut_bag(&out.term), cut_bag(&t.term), "{c}");
        }
    }
}

#[test]
fn rewriting_stays_in_the_class() {
    let t = typed("cut g (g[l]. a == g, g{ l => g == b | r => g == b })", "a:A |- b:A");
    for r in find_redexes(&t) {
        let next = apply(&t, &r).unwrap();
        let cert = decide(&t, &next, DEFAULT_BUDGET).unwrap();
        assert!(cert.is_equivalent());
    }
}

#[test]
fn flipped_cotuples_are_equivalent_with_a_replayable_chain() {
    let t = typed(FLIP, FLIP_SEQ);
    let other = typed("b{ r => a{ l => m(a, b; c) | r => m(a, b; c) } | l => a{ r => m(a, b; c) | l => m(a, b; c) } }", FLIP_SEQ);
    let EquivCertificate::Equivalent(chain) = decide(&t, &other, DEFAULT_BUDGET).unwrap() else { panic!() };
    assert_eq!(chain.steps.len(), 1);
    assert!(chain.replay(&t));
    let back = chain.reversed(&t).unwrap();
    assert!(back.replay(&t));
    assert_eq!(back.end(), &chain.start);
}

#[test]
fn different_injections_are_refuted() {
    let s = "a:A |- b:{l:A, r:A}";
    let left = typed("b[l]. a == b", s);
    let right = typed("b[r]. a == b", s);
    let cert = decide(&left, &right, DEFAULT_BUDGET).unwrap();
    let EquivCertificate::Inequivalent { left: l, right: r } = cert else { panic!("{cert:?}") };
    assert_eq!(l, representative(&left));
    assert_eq!(r, representative(&right));
}

#[test]
fn sequents_are_aligned_by_position() {
    let left = typed("b[l]. a == b", "a:A |- b:{l:A, r:A}");
    let right = typed("y[l]. x == y", "x:A |- y:{l:A, r:A}");
    assert!(decide(&left, &right, DEFAULT_BUDGET).unwrap().is_equivalent());
    let other = typed("a == b", "a:A |- b:A");
    assert!(matches!(decide(&left, &other, DEFAULT_BUDGET), Err(DecideError::SequentMismatch(..))));
}

#[test]
fn wiring_ignores_cut_bracketing() {
    let s = "|- b:B";
    let one = typed("cut g (f(; g), cut x (f(; x), m(g, x; b)))", s);
    let two = typed("cut x (f(; x), cut g (f(; g), m(g, x; b)))", s);
    assert_eq!(class_key(&one.term), class_key(&two.term));
    let swapped = typed("cut g (f(; g), cut x (f(; x), m(x, g; b)))", s);
    assert_eq!(class_key(&one.term), class_key(&swapped.term));
    let three = typed("cut g (f(; g), cut x (f(; x), m(g, x; b)))", s);
    assert!(decide(&one, &three, DEFAULT_BUDGET).unwrap().is_equivalent());
}
