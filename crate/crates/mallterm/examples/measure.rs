//! Cut heights and the bag of a term.

use mallterm::measure::{cut_bag, height};
use mallterm::surface::parse_paired;

fn main() {
    let p = parse_paired(include_str!("data/bag.ct"), None).unwrap();
    println!("height={} bag={}", height(&p.term), cut_bag(&p.term));
}
