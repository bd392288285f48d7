//! Decides equivalence of two terms and prints the conversion chain.

use mallterm::checker::check;
use mallterm::equiv::{decide, EquivCertificate, DEFAULT_BUDGET};
use mallterm::surface::{parse_paired, parse_signature, print_term, SyntaxKind};

fn main() {
    let sig = parse_signature(include_str!("data/flip.sig")).unwrap();
    let load = |text: &str| {
        let p = parse_paired(text, None).unwrap();
        check(&p.term, &p.sequent, &sig).unwrap()
    };
    let a = load(include_str!("data/flip_a.ct"));
    for other in [include_str!("data/flip_b.ct"), include_str!("data/flip_c.ct")] {
        match decide(&a, &load(other), DEFAULT_BUDGET).unwrap() {
            EquivCertificate::Equivalent(chain) => {
                println!("equivalent in {} steps", chain.steps.len());
                for c in chain.steps.iter().filter_map(|s| s.conversion.as_ref()) {
                    println!("  {c}");
                }
            }
            EquivCertificate::Inequivalent { left, right } => {
                println!("inequivalent:\n  {}\n  {}", print_term(&left, SyntaxKind::TermCalc), print_term(&right, SyntaxKind::TermCalc));
            }
            EquivCertificate::Inconclusive { explored, reason } => println!("inconclusive after {explored}: {reason}"),
        }
    }
}
