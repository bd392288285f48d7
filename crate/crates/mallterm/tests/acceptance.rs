//! Acceptance run: prints one PASS/FAIL line per criterion on stderr
//! (outside the test harness capture) and fails if any executed check
//! fails. A criterion whose full scope was not reached prints FAIL with the
//! reason while the checks it did run still have to hold.

mod common;

use std::collections::HashSet;
use std::io::Write;
use std::time::{Duration, Instant};

use mallterm::checker::{check, TypedTerm};
use mallterm::core::{Sequent, Signature, Term};
use mallterm::equiv::{apply_conversion, decide, find_conversions, EquivCertificate, DEFAULT_BUDGET};
use mallterm::generate::{atoms_only, corpus, three_axioms, GenConfig, Generator};
use mallterm::lawcheck::{
    check_diagrams, check_poly_sum, check_representability, exhaustive_corpus, poly_instance, repr_instance, run_law, DiagramVerdict, Law,
    Verdict, DEFAULT_MAX_FORMULA,
};
use mallterm::measure::{bag_less, cut_bag, height, CutBag};
use mallterm::prover::{cut_free_proofs, sequents_up_to};
use mallterm::rewriter::{apply, normal_form, normalize, residual_cuts_touch_axioms, Redex, RuleId, Variant};
use mallterm::surface::{parse_paired, parse_sequent, parse_signature, parse_term, print_term, SyntaxKind};
use rand::seq::SliceRandom;
use rand::Rng;

const VENDING: &str = include_str!("../examples/data/vending.cp");
const VENDING_SIG: &str = include_str!("../examples/data/vending.sig");
const EX11: &str = include_str!("../examples/data/ex11.cp");
const EX12: &str = include_str!("../examples/data/ex12.ct");

struct Outcome {
    /// Every check that ran held.
    held: bool,
    /// The full scope of the criterion was covered.
    covered: bool,
    detail: String,
}

fn done(held: bool, detail: String) -> Outcome {
    Outcome { held, covered: true, detail }
}

fn say(line: &str) {
    let mut e = std::io::stderr().lock();
    let _ = writeln!(e, "{line}");
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let sig = parse_signature(VENDING_SIG).unwrap();
    let v = parse_paired(VENDING, None).unwrap();
    let vending = check(&v.term, &v.sequent, &sig).is_ok();
    let p = parse_paired(EX11, None).unwrap();
    let c = parse_paired(EX12, None).unwrap();
    let want = parse_sequent("a: A * (B % C) |- b: B % (A * C)").unwrap();
    let same_ast = p.term == c.term && p.kind == SyntaxKind::ProgLang && c.kind == SyntaxKind::TermCalc;
    let tp = check(&p.term, &want, &Signature::empty());
    let tc = check(&c.term, &want, &Signature::empty());
    let same_typed = matches!((&tp, &tc), (Ok(a), Ok(b)) if a.term == b.term && a.seq == want);
    let fast = t0.elapsed() < Duration::from_secs(1);
    done(
        vending && same_ast && same_typed && fast,
        format!("vending checks: {vending}; examples parse alike: {same_ast}; both check: {same_typed}; {:?}", t0.elapsed()),
    )
}

fn generated(n: usize, seed: u64) -> Vec<(bool, TypedTerm)> {
    let cfg = GenConfig::default();
    let half = n / 2;
    let mut out: Vec<(bool, TypedTerm)> = corpus(&atoms_only(), &cfg, seed, half).into_iter().map(|t| (true, t)).collect();
    out.extend(corpus(&three_axioms(), &cfg, seed + 1_000_000, n - half).into_iter().map(|t| (false, t)));
    out
}

fn criterion_2_and_3(terms: &[(bool, TypedTerm)]) -> (Outcome, Outcome) {
    let t0 = Instant::now();
    let known = bag_less(&CutBag::from_values([2, 2, 2, 1]), &CutBag::from_values([3]))
        && bag_less(&CutBag::from_values([7]), &CutBag::from_values([7, 3]))
        && bag_less(&CutBag::from_values([5, 1]), &CutBag::from_values([5, 2]));
    let (mut steps, mut bad_bag, mut bad_height, mut with_cuts) = (0usize, 0usize, 0usize, 0usize);
    let (mut cut_free, mut empty_sig, mut axiom_ok, mut axiom_sig) = (0usize, 0usize, 0usize, 0usize);
    for (empty, t) in terms {
        with_cuts += usize::from(t.term.cut_count() > 0);
        let (nf, trace) = normalize(t, 1_000_000).expect("normalizes");
        let mut prev = t.term.clone();
        for s in &trace.steps {
            steps += 1;
            if !bag_less(&cut_bag(&s.result.term), &cut_bag(&prev)) {
                bad_bag += 1;
            }
            if height(&s.result.term) > height(&prev) {
                bad_height += 1;
            }
            prev = s.result.term.clone();
        }
        if *empty {
            empty_sig += 1;
            cut_free += usize::from(nf.term.cut_count() == 0);
        } else {
            axiom_sig += 1;
            axiom_ok += usize::from(residual_cuts_touch_axioms(&nf.term));
        }
    }
    let fast = t0.elapsed() < Duration::from_secs(60);
    let two = done(
        known && bad_bag == 0 && bad_height == 0 && terms.len() >= 5000 && fast,
        format!(
            "{} terms ({with_cuts} with cuts), {steps} steps, {bad_bag} without bag decrease, {bad_height} with height increase; reference bag orderings: {known}; {:?}",
            terms.len(),
            t0.elapsed()
        ),
    );
    let three = done(
        cut_free == empty_sig && axiom_ok == axiom_sig,
        format!("empty signature: {cut_free}/{empty_sig} cut-free; with axioms: {axiom_ok}/{axiom_sig} residual cuts all on axioms"),
    );
    (two, three)
}

#[derive(Default)]
struct Confluence {
    divergences: usize,
    /// Unresolved, or resolved without the measure decreasing.
    bad: usize,
    /// Joined by conversions alone, measure decreasing.
    conversions_only: usize,
    example: Option<String>,
    several_normal_forms: usize,
    inequivalent_normal_forms: usize,
}

/// Divergences resolve with a decreasing measure and all normal forms
/// reachable from each term are equivalent.
fn confluence_on(terms: &[TypedTerm]) -> Confluence {
    let mut c = Confluence::default();
    for t in terms {
        for r in check_diagrams(t, 6) {
            c.divergences += 1;
            match r.verdict {
                _ if !r.decreased => c.bad += 1,
                DiagramVerdict::Resolved => {}
                DiagramVerdict::ConversionsOnly => {
                    c.conversions_only += 1;
                    c.example.get_or_insert(r.divergence.clone());
                }
                DiagramVerdict::Unresolved => c.bad += 1,
            }
        }
        let nfs = common::all_normal_forms(t, 20_000);
        if nfs.len() > 1 {
            c.several_normal_forms += 1;
        }
        for u in &nfs[1..] {
            if !decide(&nfs[0], u, DEFAULT_BUDGET).map(|c| c.is_equivalent()).unwrap_or(false) {
                c.inequivalent_normal_forms += 1;
            }
        }
    }
    c
}

fn describe(what: &str, n: usize, c: &Confluence) -> String {
    format!(
        "{what}: {n} terms, {} divergences, {} unresolved or not decreasing, {} joined by conversions only, {} terms with several normal forms, {} inequivalent",
        c.divergences, c.bad, c.conversions_only, c.several_normal_forms, c.inequivalent_normal_forms
    )
}

/// Terms with cuts over sequents of at most `bound` subformula occurrences.
fn sampled_with_cuts(bound: usize, n: usize, seed: u64) -> Vec<TypedTerm> {
    let cfg = GenConfig { max_depth: 5, cut_rate: 0.5, ..GenConfig::default() };
    let sigs = [atoms_only(), three_axioms()];
    let mut out = Vec::new();
    let mut i = 0u64;
    while out.len() < n {
        let sig = &sigs[(i % 2) as usize];
        let t = Generator::new(sig, cfg.clone(), seed + i).typed();
        i += 1;
        if t.seq.subformula_count() <= bound && t.term.cut_count() > 0 {
            out.push(t);
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let t0 = Instant::now();
    let sig = atoms_only();
    let mut lines = Vec::new();
    let mut held = true;
    let mut shape_gaps = 0;
    let mut example = None;
    let mut tally = |what: String, n: usize, c: Confluence, complete: bool| {
        held &= complete && c.bad == 0 && c.inequivalent_normal_forms == 0;
        shape_gaps += c.conversions_only;
        if example.is_none() {
            example = c.example.clone();
        }
        lines.push(describe(&what, n, &c));
    };
    for (atoms, max) in [(vec!["A", "B"], 3usize), (vec!["A"], 4)] {
        let corpus = exhaustive_corpus(max, &atoms, 2, &sig, 5_000_000);
        let c = confluence_on(&corpus.terms);
        tally(format!("exhaustive size<={max} atoms {atoms:?}"), corpus.terms.len(), c, corpus.complete);
    }
    for bound in [8usize, 10] {
        let terms = sampled_with_cuts(bound, 300, 40_000 + bound as u64 * 1000);
        let c = confluence_on(&terms);
        tally(format!("sampled sequent size<={bound}"), terms.len(), c, true);
    }
    lines.push(format!("{:?}", t0.elapsed()));
    let mut missing = vec!["exhaustive enumeration at size 8 (the corpus grows ~30x per size step)".to_string()];
    if shape_gaps > 0 {
        missing.push(format!(
            "{shape_gaps} divergences against an erasing nullary conversion have no convergence with a reduction under the conversion, e.g. {}",
            example.unwrap_or_default()
        ));
    }
    Outcome { held, covered: false, detail: format!("{}; NOT COVERED: {}", lines.join("; "), missing.join("; ")) }
}

fn same_verdict(a: &EquivCertificate, b: &EquivCertificate) -> bool {
    a.is_equivalent() == b.is_equivalent() && a.is_inequivalent() == b.is_inequivalent()
}

fn criterion_5() -> Outcome {
    let t0 = Instant::now();
    let sig = atoms_only();
    let (mut pairs, mut disagree, mut equivalent, mut capped) = (0usize, 0usize, 0usize, 0usize);
    for (atoms, max) in [(vec!["A", "B"], 3usize), (vec!["A"], 4)] {
        for s in sequents_up_to(max, &atoms, 2) {
            let (proofs, complete) = cut_free_proofs(&s, &sig, 100_000);
            assert!(complete);
            let typed: Vec<TypedTerm> = proofs.iter().map(|p| check(p, &s, &sig).unwrap()).collect();
            let closures: Vec<Option<HashSet<String>>> = typed.iter().map(|t| common::closure(t, 50_000)).collect();
            for i in 0..typed.len() {
                for j in i + 1..typed.len() {
                    pairs += 1;
                    let (Some(a), Some(b)) = (&closures[i], &closures[j]) else {
                        capped += 1;
                        continue;
                    };
                    let oracle = !a.is_disjoint(b);
                    equivalent += usize::from(oracle);
                    let got = decide(&typed[i], &typed[j], DEFAULT_BUDGET).unwrap();
                    let agrees = if oracle { got.is_equivalent() } else { got.is_inequivalent() };
                    disagree += usize::from(!agrees);
                }
            }
        }
    }

    // relation properties on sampled terms of shared sequents
    let cfg = GenConfig { max_depth: 5, ..GenConfig::default() };
    let sigs = [atoms_only(), three_axioms()];
    let (mut refl_bad, mut sym_bad, mut trans_bad, mut trans_used, mut samples) = (0, 0, 0, 0, 0);
    let mut seed = 90_000u64;
    while samples < 1000 {
        let sig = &sigs[(seed % 2) as usize];
        let mut g = Generator::new(sig, cfg.clone(), seed);
        seed += 1;
        let s: Sequent = g.sequent();
        if s.subformula_count() > 8 {
            continue;
        }
        let Some(a) = g.term(&s) else { continue };
        let Some(b) = g.term(&s) else { continue };
        let (a, b) = (check(&a, &s, sig).unwrap(), check(&b, &s, sig).unwrap());
        // a third term, often in the class of the second
        let c = match find_conversions(&b).choose(g.rng()) {
            Some(conv) if g.rng().gen_bool(0.7) => apply_conversion(&b, conv).unwrap(),
            _ => match g.term(&s) {
                Some(t) => check(&t, &s, sig).unwrap(),
                None => continue,
            },
        };
        samples += 1;
        let d = |x: &TypedTerm, y: &TypedTerm| decide(x, y, DEFAULT_BUDGET).unwrap();
        refl_bad += usize::from(!d(&a, &a).is_equivalent());
        sym_bad += usize::from(!same_verdict(&d(&a, &b), &d(&b, &a)));
        let (ab, bc) = (d(&a, &b), d(&b, &c));
        if ab.is_equivalent() && bc.is_equivalent() {
            trans_used += 1;
            trans_bad += usize::from(!d(&a, &c).is_equivalent());
        }
    }
    let held = disagree == 0 && capped == 0 && refl_bad == 0 && sym_bad == 0 && trans_bad == 0;
    Outcome {
        held,
        covered: false,
        detail: format!(
            "exhaustive cut-free sizes <=3 (two atoms) and <=4 (one atom): {pairs} pairs, {equivalent} equivalent by the oracle, {disagree} disagreements, {capped} over the oracle cap; \
             {samples} sampled triples: {refl_bad} reflexivity, {sym_bad} symmetry, {trans_bad} transitivity failures ({trans_used} chains); {:?}; \
             NOT COVERED: exhaustive size 8 (1.39M sequents already at size 6)",
            t0.elapsed()
        ),
    }
}

/// Runs seeds from `seed` until `want` instances pass or one fails.
fn law_passes(law: Law, want: usize, seed: u64) -> (usize, usize, usize) {
    let (mut pass, mut skip, mut bad) = (0, 0, 0);
    let mut s = seed;
    while pass < want && s < seed + 20 * want as u64 {
        match run_law(law, s, DEFAULT_MAX_FORMULA).verdict {
            Verdict::Pass => pass += 1,
            Verdict::Skip => skip += 1,
            v => {
                bad += 1;
                eprintln!("{law} seed {s}: {v:?}");
            }
        }
        s += 1;
    }
    (pass, skip, bad)
}

fn criterion_6() -> Outcome {
    let t0 = Instant::now();
    let mut parts = Vec::new();
    let mut held = true;
    for (law, want) in [(Law::Identity, 1000), (Law::Assoc, 1000), (Law::Interchange, 1000), (Law::PolySum, 200), (Law::Representability, 200)] {
        let (pass, skip, bad) = law_passes(law, want, 1);
        held &= pass >= want && bad == 0;
        parts.push(format!("{law} {pass} pass/{skip} skip/{bad} fail"));
    }
    // both nullary unit cases of each bijection
    let sig = atoms_only();
    let mut nullary = 0;
    for dual in [false, true] {
        for seed in 0..10 {
            let mut g = Generator::new(&sig, GenConfig { max_formula: 2, ..GenConfig::default() }, seed);
            let (t, a, s) = poly_instance(&mut g, dual, 0).expect("empty sums have instances");
            held &= check_poly_sum(&t, &a, &s).unwrap();
            let (t, a, s) = repr_instance(&mut g, dual, 0).expect("units have instances");
            held &= check_representability(&t, &a, &s).unwrap();
            nullary += 2;
        }
    }
    parts.push(format!("{nullary} nullary instances (0, 1, top, bot)"));
    done(held, format!("{}; {:?}", parts.join(", "), t0.elapsed()))
}

fn criterion_7(terms: &[(bool, TypedTerm)]) -> Outcome {
    let mut bad = 0;
    for (_, t) in terms.iter().take(1000) {
        let canon = t.term.canonicalize();
        let mut back = Vec::new();
        for k in [SyntaxKind::TermCalc, SyntaxKind::ProgLang] {
            let parsed: Term = parse_term(&print_term(&t.term, k), k).expect("printed terms parse");
            bad += usize::from(parsed.canonicalize() != canon);
            back.push(parsed);
        }
        bad += usize::from(back[0] != back[1]);
    }
    done(bad == 0, format!("{} terms, {bad} round-trip or cross-syntax mismatches", terms.len().min(1000)))
}

fn criterion_8() -> Outcome {
    let empty = Signature::empty();
    let blocking = check(&parse_term("a<() => b<>>", SyntaxKind::TermCalc).unwrap(), &parse_sequent("a:top |- b:top").unwrap(), &empty).unwrap();
    let blocked = !find_conversions(&blocking).iter().any(|c| c.rule.number == 23);

    let mut shapes = HashSet::new();
    for s in sequents_up_to(5, &[], 2) {
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

    let sig = parse_signature("atom A, B\naxiom f : -> A").unwrap();
    let fixtures = [
        ("cut g (a{}, g == b)", "a:0 |- b:A", RuleId::new(3, Variant::NullaryCotuple), "a{}"),
        ("cut g (a<() => f(; g)>, g == b)", "a:top |- b:A", RuleId::new(7, Variant::NullarySplit), "a<() => cut g (f(; g), g == b)>"),
        ("cut g (g<>, g<() => f(; b)>)", "|- b:A", RuleId::new(13, Variant::NullaryFork), "f(; b)"),
    ];
    let mut fired = 0;
    for (t, s, rule, want) in fixtures {
        let seq = parse_sequent(s).unwrap();
        let tt = check(&parse_term(t, SyntaxKind::TermCalc).unwrap(), &seq, &sig).unwrap();
        let Ok(out) = apply(&tt, &Redex { path: vec![], rule }) else { continue };
        let want = parse_term(want, SyntaxKind::TermCalc).unwrap();
        let same = out.term.erase_annotations().canonicalize() == want.erase_annotations().canonicalize();
        // a surviving empty case must carry the sequent it now sits in
        let ctx_ok = match &out.term {
            Term::Case { ctx: Some(c), branches, .. } if branches.is_empty() => c == &seq,
            _ => true,
        };
        fired += usize::from(same && ctx_ok && bag_less(&cut_bag(&out.term), &cut_bag(&tt.term)));
    }
    // an empty case moved out of a composite takes the outer sequent
    let outer = parse_sequent("a:0 |- b:B").unwrap();
    let sig2 = parse_signature("atom A, B\naxiom f : -> A").unwrap();
    let moved = check(&parse_term("cut g (f(; g), cut x (g == x, a{}))", SyntaxKind::TermCalc).unwrap(), &outer, &sig2).unwrap();
    let ctx_updated = matches!(
        normal_form(&moved, 100).map(|n| n.term),
        Ok(Term::Case { ctx: Some(ref c), ref branches, .. }) if branches.is_empty() && c == &outer
    );
    done(
        blocked && shapes.len() == 13 && fired == 3 && ctx_updated,
        format!(
            "blocking case has no (23): {blocked}; nullary conversion shapes: {}; nullary (3)/(7)/(13) fixtures: {fired}/3; moved empty case carries outer sequent: {ctx_updated}",
            shapes.len()
        ),
    )
}

#[test]
fn acceptance() {
    let terms = generated(5000, 1);
    let (two, three) = criterion_2_and_3(&terms);
    let results = [
        (1, criterion_1()),
        (2, two),
        (3, three),
        (4, criterion_4()),
        (5, criterion_5()),
        (6, criterion_6()),
        (7, criterion_7(&terms)),
        (8, criterion_8()),
    ];
    for (n, o) in &results {
        let tag = if o.held && o.covered { "PASS" } else { "FAIL" };
        say(&format!("criterion {n}: {tag}: {}", o.detail));
    }
    let broken: Vec<_> = results.iter().filter(|(_, o)| !o.held).map(|(n, _)| *n).collect();
    assert!(broken.is_empty(), "criteria with failing checks: {broken:?}");
}
