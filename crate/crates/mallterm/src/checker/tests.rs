use super::*;
use crate::surface::{parse_formula, parse_sequent, parse_signature, parse_term};

const EX11: &str = "split a as a1, a2 in split b as b1, b2 in fork a2 as
  | a21 with b1 => a21 == b1
  | a22 with a1, b2 => fork b2 as
      | b21 with a1 in a1 == b21
      | b22 with a22 in a22 == b22";

const EX12: &str = "a<(a1, a2) => b<(b1, b2) => a2< a21 | {b1} => a21 == b1 ; a22 | {a1, b2} => \
                    b2< b21 | {a1} => a1 == b21 ; b22 | {a22} => a22 == b22 > > > >";

const VENDING_SEQ: &str = "a: {c1:D1, c2:D2} * {gal:top, gum:top} |- b: {a:GAL, b:GUM * {change:D1, nochange:top}, c:D1}";

const VENDING: &str = "split a as a1, a2 in input a1 of
  | c1 => (input a2 of
      | gal => close a2 in output c on b in a1 == b
      | gum => close a2 in output b on b in fork b as
          | b1 with a1 => gum(a1; b1)
          | b2 with => output nochange on b2 in end b2)
  | c2 => input a2 of
      | gal => close a2 in output a on b in gal(a1; b)
      | gum => close a2 in output b on b in on g plug gumch(a1; g) to split g as g1, g2 in fork b as
          | b1 with g1 => g1 == b1
          | b2 with g2 => output change on b2 in g2 == b2";

const VENDING_SIG: &str = "atom D1, D2, GAL, GUM
axiom gal : D2 -> GAL
axiom gum : D1 -> GUM
axiom gumch : D2 -> GUM * D1";

fn seq(s: &str) -> Sequent {
    parse_sequent(s).unwrap()
}

fn tc(s: &str) -> Term {
    parse_term(s, SyntaxKind::TermCalc).unwrap()
}

fn kind_of(t: &str, s: &str) -> TypeErrorKind {
    check(&tc(t), &seq(s), &Signature::empty()).unwrap_err().kind
}

#[test]
fn distribution_example_in_both_syntaxes() {
    let s = seq("a: A * (B % C) |- b: B % (A * C)");
    let prog = parse_term(EX11, SyntaxKind::ProgLang).unwrap();
    let calc = tc(EX12);
    assert_eq!(prog, calc);
    let typed = check(&calc, &s, &Signature::empty()).unwrap();
    assert_eq!(typed.seq, s);
    assert_eq!(typed.term.free_channels().unwrap(), s.channels());
}

#[test]
fn vending_machine() {
    let sig = parse_signature(VENDING_SIG).unwrap();
    let t = parse_term(VENDING, SyntaxKind::ProgLang).unwrap();
    let typed = check(&t, &seq(VENDING_SEQ), &sig).unwrap();
    assert_eq!(typed.term.cut_count(), 1);
    // the cut formula comes from the axiom's output
    let printed = typed.print(SyntaxKind::ProgLang);
    assert!(printed.starts_with("split a as a1, a2 in input a1 of"));
    assert!(!printed.contains(" : "), "cut formula is inferable: {printed}");
    // the listing in the source text names the wrong input on the last axiom
    let typo = VENDING.replace("gumch(a1; g)", "gumch(a2; g)");
    let rejected = match parse_term(&typo, SyntaxKind::ProgLang) {
        Err(_) => true,
        Ok(t) => check(&t, &seq(VENDING_SEQ), &sig).is_err(),
    };
    assert!(rejected);
}

#[test]
fn nullary_fork_needs_an_empty_context() {
    assert_eq!(kind_of("a<>", "|- a:top, b:A"), TypeErrorKind::LeftoverChannels);
    assert_eq!(kind_of("a<>", "b:A |- a:top"), TypeErrorKind::LeftoverChannels);
    assert!(check(&tc("a<>"), &seq("|- a:top"), &Signature::empty()).is_ok());
    assert!(check(&tc("a<>"), &seq("a:bot |-"), &Signature::empty()).is_ok());
}

#[test]
fn nullary_case_gets_its_context() {
    let typed = check(&tc("a{}"), &seq("a:0, x:A |- y:B"), &Signature::empty()).unwrap();
    match &typed.term {
        Term::Case { ctx: Some(s), .. } => assert_eq!(s.len(), 3),
        other => panic!("{other:?}"),
    }
    assert_eq!(typed.print(SyntaxKind::TermCalc), "a{}");
    assert!(check(&tc("b{}"), &seq("x:A |- b:1"), &Signature::empty()).is_ok());
    assert_eq!(kind_of("b{}", "x:A |- b:0"), TypeErrorKind::WrongConnective);
}

#[test]
fn error_kinds() {
    use TypeErrorKind::*;
    assert_eq!(kind_of("a == c", "a:A |- b:A"), UnknownChannel);
    assert_eq!(kind_of("a[x]. a == b", "a:A |- b:A"), WrongConnective);
    assert_eq!(kind_of("a == b", "a:A |- b:B"), WrongConnective);
    assert_eq!(kind_of("a[z]. a == b", "a:[x:A] |- b:A"), TagNotInType);
    assert_eq!(kind_of("a{ x => a == b }", "a:{x:A, y:A} |- b:A"), ArityMismatch);
    assert_eq!(kind_of("a<(p) => p == b>", "a:A * A |- b:A"), ArityMismatch);
    assert_eq!(kind_of("b< p | {} => a == p ; q | {} => c == q >", "a:A, c:A |- b:A * A"), PartitionError);
    assert_eq!(kind_of("b< p | {a} => a == p ; q | {c, z} => c == q >", "a:A, c:A |- b:A * A"), PartitionError);
    assert_eq!(kind_of("a == b", "a:A, c:A |- b:A"), LeftoverChannels);
    assert_eq!(kind_of("cut a : A (x == a, a == b)", "a:A, x:A |- b:A"), SharedChannelInCut);
    assert_eq!(kind_of("f(a; b)", "a:A |- b:A"), AxiomSignatureMismatch);
    assert_eq!(kind_of("cut g (a{}, g[x]. g == b)", "a:0 |- b:A"), UninferableCut);
}

#[test]
fn errors_point_at_nodes() {
    let src = "a<(p, q) => cut g (p == g, g == q)>";
    let (t, spans) = crate::surface::parse_term_spanned(src, SyntaxKind::TermCalc).unwrap();
    let e = check(&t, &seq("a: A * B |- "), &Signature::empty()).unwrap_err().located(&spans);
    assert_eq!(e.path, vec![0, 1]);
    let sp = e.span.unwrap();
    assert_eq!(&src[sp.start..sp.end], "g == q");
}

#[test]
fn identity_expansions() {
    let a: Chan = "a".into();
    let b: Chan = "b".into();
    let id = |x: &str| identity_term(&parse_formula(x).unwrap(), &a, &b).term;
    assert_eq!(id("A"), Term::id("a", "b"));
    assert_eq!(id("{i:A}"), tc("a{ i => b[i]. a == b }"));
    assert_eq!(id("top"), tc("a<() => b<>>"));
    assert_eq!(id("bot"), tc("b<() => a<>>"));
    assert_eq!(id("0").erase_annotations(), tc("a{}"));
    assert_eq!(id("1").erase_annotations(), tc("b{}"));
    assert_eq!(id("A * B"), tc("a<(a_1, a_2) => b< b_1 | {a_1} => a_1 == b_1 ; b_2 | {a_2} => a_2 == b_2 >>"));
    assert_eq!(id("A % B"), tc("b<(b_1, b_2) => a< a_1 | {b_1} => a_1 == b_1 ; a_2 | {b_2} => a_2 == b_2 >>"));
    let deep = "[p: {l: A * B, r: top}, q: bot % (1 * 0)]";
    let t = identity_term(&parse_formula(deep).unwrap(), &a, &b);
    assert_eq!(t.seq.len(), 2);
}

#[test]
fn composition() {
    let sig = {
        let mut s = Signature::empty();
        s.add_atom("A");
        s.add_axiom("f", vec![], vec![Formula::atom("A")]).unwrap();
        s
    };
    let f = check(&tc("f(; g)"), &seq("|- g:A"), &sig).unwrap();
    let one = identity_term(&Formula::atom("A"), &"g".into(), &"d".into());
    let c = compose(&f, &one, &"g".into()).unwrap();
    assert_eq!(c.seq, seq("|- d:A"));

    // g reuses the free name x of f
    let f = check(&tc("x{ l => g[l]. x == g }"), &seq("x:{l:A} |- g:{l:A}"), &sig).unwrap();
    let g = check(&tc("g{ l => g == x }"), &seq("g:{l:A} |- x:A"), &sig).unwrap();
    let c = compose(&f, &g, &"g".into()).unwrap();
    let fl = f.term.free_channels().unwrap();
    assert_eq!(c.seq.len(), 2);
    let renamed: Vec<_> = c.seq.cod.keys().collect();
    assert!(!fl.contains(renamed[0]));

    let h = check(&tc("g == y"), &seq("g:B |- y:B"), &sig).unwrap();
    assert!(matches!(compose(&f, &h, &"g".into()), Err(ComposeError::ChannelTypeMismatch(..))));
    assert!(matches!(compose(&f, &h, &"zz".into()), Err(ComposeError::NoSuchChannel(..))));
}

#[test]
fn decorations_follow_paths() {
    let s = seq("a: A * (B % C) |- b: B % (A * C)");
    let typed = check(&tc(EX12), &s, &Signature::empty()).unwrap();
    let inner = typed.seq_at(&[0, 0]).unwrap();
    assert_eq!(inner.len(), 4);
    assert_eq!(typed.side_at(&[0, 0], &"a2".into()), Some(Side::Dom));
    assert_eq!(typed.side_at(&[0, 0], &"b2".into()), Some(Side::Cod));
    assert!(typed.seq_at(&[5]).is_none());
}
