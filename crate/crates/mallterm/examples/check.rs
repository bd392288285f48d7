//! Typechecks the vending machine against its signature.

use mallterm::checker::check;
use mallterm::surface::{parse_paired, parse_signature, print_sequent};

fn main() {
    let sig = parse_signature(include_str!("data/vending.sig")).unwrap();
    let p = parse_paired(include_str!("data/vending.cp"), None).unwrap();
    match check(&p.term, &p.sequent, &sig) {
        Ok(t) => println!("ok: {}", print_sequent(&t.seq)),
        Err(e) => println!("type error: {e}"),
    }
}
