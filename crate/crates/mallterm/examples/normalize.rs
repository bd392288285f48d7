//! Eliminates the cuts of a term, printing every step.

use mallterm::checker::check;
use mallterm::core::Signature;
use mallterm::rewriter::normalize;
use mallterm::surface::{parse_paired, SyntaxKind};

fn main() {
    let p = parse_paired(include_str!("data/redex.ct"), None).unwrap();
    let t = check(&p.term, &p.sequent, &Signature::empty()).unwrap();
    let (nf, trace) = normalize(&t, 1000).unwrap();
    for s in &trace.steps {
        println!("{} at {:?}  bag {} -> {}", s.redex.rule, s.redex.path, s.bag_before, s.bag_after);
    }
    println!("{}", nf.print(SyntaxKind::TermCalc));
}
