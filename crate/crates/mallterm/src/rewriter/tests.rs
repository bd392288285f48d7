use super::*;
use crate::checker::check;
use crate::core::Signature;
use crate::measure::height;
use crate::surface::{parse_sequent, parse_signature, parse_term, SyntaxKind};

fn sig() -> Signature {
    parse_signature("atom A, B, C\naxiom f : -> A\naxiom h : A ->\naxiom k : A -> B\naxiom two : -> A, A\naxiom m : A, A -> B\naxiom n : B, A ->").unwrap()
}

fn typed(t: &str, s: &str) -> TypedTerm {
    let term = parse_term(t, SyntaxKind::TermCalc).unwrap();
    check(&term, &parse_sequent(s).unwrap(), &sig()).unwrap()
}

fn same(a: &Term, b: &Term) -> bool {
    a.erase_annotations().canonicalize() == b.erase_annotations().canonicalize()
}

/// Applies `rule` at the root and compares with `expect`.
fn fires(t: &str, s: &str, rule: RuleId, expect: &str) {
    let tt = typed(t, s);
    let rules = rules_at(&tt.term, &[]);
    assert!(rules.contains(&rule), "{rule} not among {rules:?} for {t}");
    let out = apply(&tt, &Redex { path: vec![], rule }).unwrap();
    let want = parse_term(expect, SyntaxKind::TermCalc).unwrap();
    assert!(same(&out.term, &want), "{rule}: got {}", out.print(SyntaxKind::TermCalc));
    assert!(cut_bag(&out.term) < cut_bag(&tt.term));
    assert!(height(&out.term) <= height(&tt.term));
}

#[test]
fn identity_rules() {
    fires("cut g (f(; g), g == b)", "|- b:A", RuleId::standard(1), "f(; b)");
    fires("cut g (a == g, h(g;))", "a:A |-", RuleId::standard(2), "h(a;)");
}

#[test]
fn commuting_cases() {
    fires(
        "cut g (a{ l => a == g | r => a == g }, h(g;))",
        "a:{l:A, r:A} |-",
        RuleId::standard(3),
        "a{ l => cut g (a == g, h(g;)) | r => cut g (a == g, h(g;)) }",
    );
    fires(
        "cut g (f(; g), b{ l => b[l]. g == b | r => b[r]. g == b })",
        "|- b:[l:{l:A, r:A}, r:{l:A, r:A}]",
        RuleId::standard(4),
        "b{ l => cut g (f(; g), b[l]. g == b) | r => cut g (f(; g), b[r]. g == b) }",
    );
    fires("cut g (a[l]. a == g, h(g;))", "a:[l:A] |-", RuleId::standard(5), "a[l]. cut g (a == g, h(g;))");
    fires("cut g (f(; g), b[l]. g == b)", "|- b:{l:A}", RuleId::standard(6), "b[l]. cut g (f(; g), g == b)");
}

#[test]
fn commuting_splits() {
    fires(
        "cut g (a<(p, q) => m(p, q; g)>, g == b)",
        "a:A * A |- b:B",
        RuleId::standard(7),
        "a<(p, q) => cut g (m(p, q; g), g == b)>",
    );
    // the moving side uses the name p freely, so the binder is renamed
    let tt = typed("cut g (a<(p, q) => m(p, q; g)>, n(g, p;))", "a:A * A, p:A |-");
    let out = apply(&tt, &Redex { path: vec![], rule: RuleId::standard(7) }).unwrap();
    let Term::Split { parts, .. } = &out.term else { panic!() };
    assert_ne!(parts[0].as_str(), "p");
    fires(
        "cut g (f(; g), b<(p, q) => q{ } >)",
        "|- b:A % 1",
        RuleId::standard(8),
        "b<(p, q) => cut g (f(; g), q{})>",
    );
}

#[test]
fn commuting_forks() {
    fires(
        "cut g (f(; g), b< p | {g} => g == p ; q | {c} => c == q >)",
        "c:B |- b:A * B",
        RuleId::standard(10),
        "b< p | {} => cut g (f(; g), g == p) ; q | {c} => c == q >",
    );
    fires(
        "cut g (b< p | {a} => a == p ; q | {g} => two(; g, q) >, h(g;))",
        "a:A |- b:A * A",
        RuleId::standard(9),
        "b< p | {a} => a == p ; q | {} => cut g (two(; g, q), h(g;)) >",
    );
}

#[test]
fn principal_cuts() {
    fires(
        "cut g (g[l]. a == g, g{ l => g == b | r => g == b })",
        "a:A |- b:A",
        RuleId::standard(11),
        "cut g (a == g, g == b)",
    );
    fires(
        "cut g (g{ l => a == g | r => a == g }, g[r]. g == b)",
        "a:A |- b:A",
        RuleId::standard(12),
        "cut g (a == g, g == b)",
    );
    fires(
        "cut g (g< p | {a} => a == p ; q | {c} => c == q >, g<(u, v) => m(u, v; b)>)",
        "a:A, c:A |- b:B",
        RuleId::standard(13),
        "cut q (c == q, cut p (a == p, m(p, q; b)))",
    );
    fires(
        "cut g (g<(u, v) => two(; u, v)>, g< p | {} => h(p;) ; q | {b} => q == b >)",
        "|- b:A",
        RuleId::standard(14),
        "cut p (cut q (two(; p, q), q == b), h(p;))",
    );
}

#[test]
fn nullary_forms() {
    fires("cut g (a{}, g == b)", "a:0 |- b:A", RuleId::new(3, Variant::NullaryCotuple), "a{}");
    fires("cut g (g<>, g<() => f(; b)>)", "|- b:A", RuleId::new(13, Variant::NullaryFork), "f(; b)");
    fires("cut g (g<() => f(; b)>, g<>)", "|- b:A", RuleId::new(14, Variant::NullaryFork), "f(; b)");
    fires(
        "cut g (a<() => f(; g)>, g == b)",
        "a:top |- b:A",
        RuleId::new(7, Variant::NullarySplit),
        "a<() => cut g (f(; g), g == b)>",
    );
    // the new empty case carries the outer sequent
    let tt = typed("cut g (f(; g), cut x (g == x, a{}))", "a:0 |- b:B");
    let (nf, _) = normalize(&tt, 100).unwrap();
    match &nf.term {
        Term::Case { ctx: Some(s), branches, .. } => {
            assert!(branches.is_empty());
            assert_eq!(s, &parse_sequent("a:0 |- b:B").unwrap());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn not_a_redex() {
    let tt = typed("f(; b)", "|- b:A");
    assert!(find_redexes(&tt).is_empty());
    let e = apply(&tt, &Redex { path: vec![], rule: RuleId::standard(1) }).unwrap_err();
    assert!(matches!(e, RewriteError::NotARedex { .. }));
}

#[test]
fn normalizes_a_composite_of_expanded_identities() {
    let x = crate::surface::parse_formula("{l: A * (B % C), r: top} % [u: 1, v: 0]").unwrap();
    let one = crate::checker::identity_term(&x, &"a".into(), &"g".into());
    let two = crate::checker::identity_term(&x, &"g".into(), &"b".into());
    let c = crate::checker::compose(&one, &two, &"g".into()).unwrap();
    let (nf, trace) = normalize(&c, 10_000).unwrap();
    assert_eq!(nf.term.cut_count(), 0);
    for s in &trace.steps {
        assert!(s.bag_after < s.bag_before);
    }
    assert_eq!(nf.seq, c.seq);
}

#[test]
fn residual_axiom_cuts() {
    let vending = parse_signature("atom D1, D2, GUM\naxiom gumch : D2 -> GUM * D1").unwrap();
    let t = parse_term("cut g (gumch(a; g), g<(x, y) => b< p | {x} => x == p ; q | {y} => y == q >>)", SyntaxKind::TermCalc).unwrap();
    let tt = check(&t, &parse_sequent("a:D2 |- b:GUM * D1").unwrap(), &vending).unwrap();
    let (nf, _) = normalize(&tt, 100).unwrap();
    assert_eq!(nf.term.cut_count(), 1);
    assert!(residual_cuts_touch_axioms(&nf.term));

    let tt = typed("cut g (f(; g), cut x (k(g; x), x == b))", "|- b:B");
    let (nf, _) = normalize(&tt, 100).unwrap();
    assert!(residual_cuts_touch_axioms(&nf.term));
    assert!(choose_redex(&nf.term).is_none());
}

#[test]
fn budget_is_reported() {
    let tt = typed("cut g (f(; g), cut x (g == x, x == b))", "|- b:A");
    assert!(matches!(normalize(&tt, 0), Err(RewriteError::StepBudgetExceeded(0))));
    assert!(normalize(&tt, 5).is_ok());
}
