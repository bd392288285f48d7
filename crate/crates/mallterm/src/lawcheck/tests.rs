use super::*;
use crate::checker::check;
use crate::core::Signature;
use crate::generate::{atoms_only, GenConfig, Generator};
use crate::rewriter::RuleId;
use crate::surface::{parse_formula, parse_sequent, parse_signature, parse_term, SyntaxKind};

const EX12: &str = "a<(a1, a2) => b<(b1, b2) => a2< a21 | {b1} => a21 == b1 ; a22 | {a1, b2} => \
                    b2< b21 | {a1} => a1 == b21 ; b22 | {a22} => a22 == b22 > > > >";

fn sig() -> Signature {
    parse_signature("atom A, B\naxiom k : A -> B\naxiom f : -> A").unwrap()
}

fn typed(t: &str, s: &str) -> TypedTerm {
    check(&parse_term(t, SyntaxKind::TermCalc).unwrap(), &parse_sequent(s).unwrap(), &sig()).unwrap()
}

#[test]
fn identity_cut_has_one_divergence() {
    let t = typed("cut g (a == g, g == b)", "a:A |- b:A");
    let ds = enumerate_divergences(&t);
    assert_eq!(ds.len(), 1);
    assert_eq!(ds[0].left.0.rule, RuleId::standard(1));
    assert_eq!(ds[0].right.0.rule(), RuleId::standard(2));
    let r = resolve(&ds[0], 6);
    assert_eq!(r.verdict, DiagramVerdict::Resolved);
    assert!(r.left.is_empty() && r.right.is_empty() && r.conversions.is_empty());
    assert!(r.decreased);
}

#[test]
fn cut_free_terms_do_not_diverge() {
    assert!(enumerate_divergences(&typed("b[l]. a == b", "a:A |- b:{l:A}")).is_empty());
}

#[test]
fn projection_against_injection_needs_a_conversion() {
    let t = typed("cut g (a[l]. a == g, b[r]. k(g; b))", "a:[l:A, r:A] |- b:{l:B, r:B}");
    let ds = enumerate_divergences(&t);
    let d = ds.iter().find(|d| matches!(d.right.0, Move::Reduction(_))).expect("two reductions at the root");
    let r = resolve(d, 6);
    assert_eq!(r.verdict, DiagramVerdict::Resolved);
    assert_eq!(r.conversions.len(), 1);
    assert_eq!(r.conversions[0].rule, Some(RuleId::standard(19)));
    assert!(r.decreased, "{r:?}");
}

#[test]
fn principal_cut_against_a_conversion() {
    let t = typed("cut g (g[l]. a == g, g{ l => b[l]. g == b | r => b[l]. g == b })", "a:A |- b:{l:A, r:A}");
    let ds = enumerate_divergences(&t);
    assert!(ds.iter().any(|d| d.left.0.rule == RuleId::standard(11) && d.right.0.rule() == RuleId::standard(16)));
    for d in &ds {
        let r = resolve(d, 6);
        assert_eq!(r.verdict, DiagramVerdict::Resolved, "{}", r.divergence);
        assert!(r.decreased, "{r:?}");
    }
}

#[test]
fn identity_law_examples() {
    let id = typed("a == b", "a:A |- b:A");
    assert!(check_identity_law(&id, &"b".into()).unwrap());
    assert!(check_identity_law(&id, &"a".into()).unwrap());
    let ex = check(
        &parse_term(EX12, SyntaxKind::TermCalc).unwrap(),
        &parse_sequent("a: A * (B % C) |- b: B % (A * C)").unwrap(),
        &Signature::empty(),
    )
    .unwrap();
    assert!(check_identity_law(&ex, &"b".into()).unwrap());
    assert!(check_identity_law(&ex, &"a".into()).unwrap());
    let sum = typed("a{ l => b[r]. a == b | r => b[l]. a == b }", "a:{l:A, r:A} |- b:{l:A, r:A}");
    assert!(check_identity_law(&sum, &"a".into()).unwrap());
    assert!(check_identity_law(&sum, &"b".into()).unwrap());
}

#[test]
fn associativity_of_axiom_composites() {
    let f = typed("f(; u)", "|- u:A");
    let g = typed("k(u; v)", "u:A |- v:B");
    let h = typed("v == w", "v:B |- w:B");
    assert!(check_assoc(&f, &g, &h, &"u".into(), &"v".into()).unwrap());
}

fn typed_in(sig: &str, t: &str, s: &str) -> TypedTerm {
    check(&parse_term(t, SyntaxKind::TermCalc).unwrap(), &parse_sequent(s).unwrap(), &parse_signature(sig).unwrap()).unwrap()
}

#[test]
fn interchange_in_both_shapes() {
    let sig = "atom A, B\naxiom two : -> A, B\naxiom m : A, B ->\naxiom p : -> A\naxiom q : -> B\naxiom k : A -> B";
    let f = typed_in(sig, "two(; u, v)", "|- u:A, v:B");
    let g = typed_in(sig, "k(u; x)", "u:A |- x:B");
    let h = typed_in(sig, "v == y", "v:B |- y:B");
    assert!(check_interchange(&f, &g, &h, &"u".into(), &"v".into()).unwrap());
    let f = typed_in(sig, "m(u, v;)", "u:A, v:B |-");
    let g = typed_in(sig, "p(; u)", "|- u:A");
    let h = typed_in(sig, "q(; v)", "|- v:B");
    assert!(check_interchange(&f, &g, &h, &"u".into(), &"v".into()).unwrap());
    assert!(check_interchange(&f, &g, &h, &"u".into(), &"w".into()).is_err());
}

#[test]
fn sums_and_products_are_bijective() {
    let t = typed("a{ l => k(a; b) | r => k(a; b) }", "a:{l:A, r:A} |- b:B");
    let s = vec![typed("k(a; b)", "a:A |- b:B"), typed("k(a; b)", "a:A |- b:B")];
    assert!(check_poly_sum(&t, &"a".into(), &s).unwrap());
    let t = typed("b{ l => a == b | r => a == b }", "a:A |- b:[l:A, r:A]");
    let s = vec![typed("a == b", "a:A |- b:A"), typed("a == b", "a:A |- b:A")];
    assert!(check_poly_sum(&t, &"b".into(), &s).unwrap());
    assert!(check_poly_sum(&t, &"a".into(), &s).is_err());
}

#[test]
fn empty_sums_and_products() {
    let t = typed("a{}", "a:0 |- b:A");
    assert!(check_poly_sum(&t, &"a".into(), &[]).unwrap());
    let t = typed("b{}", "a:A |- b:1");
    assert!(check_poly_sum(&t, &"b".into(), &[]).unwrap());
}

#[test]
fn tensors_and_pars_are_represented() {
    let sig = "atom A, B\naxiom m : A, A -> B\naxiom d : A -> B, B";
    let t = typed_in(sig, "al<(p, q) => m(p, q; b)>", "al: *(p:A, q:A) |- b:B");
    let s = typed_in(sig, "m(p, q; b)", "p:A, q:A |- b:B");
    assert!(check_representability(&t, &"al".into(), &s).unwrap());
    let t = typed_in(sig, "al<(p, q) => d(a; p, q)>", "a:A |- al: %(p:B, q:B)");
    let s = typed_in(sig, "d(a; p, q)", "a:A |- p:B, q:B");
    assert!(check_representability(&t, &"al".into(), &s).unwrap());
}

#[test]
fn units_are_represented() {
    let s = typed("f(; b)", "|- b:A");
    let t = typed("al<() => f(; b)>", "al:top |- b:A");
    assert!(check_representability(&t, &"al".into(), &s).unwrap());
    let t = typed("al<() => f(; b)>", "|- b:A, al:bot");
    assert!(check_representability(&t, &"al".into(), &s).unwrap());
}

#[test]
fn injection_translation() {
    let f = typed("k(a; b)", "a:A |- b:B");
    assert!(check_injection(&f, &"b".into(), &parse_formula("{l:B, r:A}").unwrap(), &"l".into()).unwrap());
    assert!(check_injection(&f, &"a".into(), &parse_formula("[l:B, r:A]").unwrap(), &"r".into()).unwrap());
    assert!(check_injection(&f, &"a".into(), &parse_formula("[l:B, r:A]").unwrap(), &"l".into()).is_err());
}

#[test]
fn generated_instances_pass() {
    for law in Law::ALL {
        let reports = sweep(law, 100, 12, DEFAULT_MAX_FORMULA);
        for r in &reports {
            assert!(matches!(r.verdict, Verdict::Pass | Verdict::Skip), "{law} seed {}: {:?}\n{}", r.seed, r.verdict, r.detail.clone().unwrap_or_default());
        }
        assert!(reports.iter().filter(|r| r.verdict == Verdict::Pass).count() >= 10, "{law}: too many skips");
    }
}

#[test]
fn instances_are_well_formed() {
    let sig = atoms_only();
    let mut g = Generator::new(&sig, GenConfig { max_formula: 2, ..GenConfig::default() }, 3);
    let (t, a, s) = repr_instance(&mut g, false, 2).unwrap();
    assert_eq!(s.seq.len(), t.seq.len() + 1);
    assert!(t.seq.contains(&a));
}

#[test]
fn an_erasing_conversion_leaves_nothing_to_reduce() {
    let t = typed_in(
        "atom A, B, C",
        "b1{ a => b3< b3_1 | {b2} => b2{} ; b3_2 | {b1} => cut g1 (g1<>, b3_2{}) > }",
        "|- b1:[a:B], b2:1, b3:*(b3_1:C, b3_2:1)",
    );
    let ds = enumerate_divergences(&t);
    let d = ds.iter().find(|d| d.right.0.rule() == RuleId::new(18, crate::rewriter::Variant::EmptyI)).expect("the erasing conversion overlaps the cut");
    let r = resolve(d, 6);
    assert_eq!(r.verdict, DiagramVerdict::ConversionsOnly);
    assert!(r.decreased);
}
