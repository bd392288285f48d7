//! Reads a term in one syntax and prints it in the other.
//!
//! cargo run --example parse -- examples/data/ex11.cp

use mallterm::surface::{parse_paired, print_sequent, print_term, SyntaxKind};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/ex11.cp").into());
    let text = std::fs::read_to_string(&path).expect("readable file");
    let p = parse_paired(&text, None).unwrap_or_else(|e| panic!("{path}: {e}"));
    let other = match p.kind {
        SyntaxKind::TermCalc => SyntaxKind::ProgLang,
        SyntaxKind::ProgLang => SyntaxKind::TermCalc,
    };
    println!("{}\n---\n{}", print_sequent(&p.sequent), print_term(&p.term, other));
}
