//! Term height, bags of cut heights and the multiset ordering on them.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::core::Term;

/// A finite multiset of naturals, stored as value -> multiplicity.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct CutBag(BTreeMap<u64, usize>);

impl CutBag {
    pub fn new() -> CutBag {
        CutBag::default()
    }

    pub fn from_values(vals: impl IntoIterator<Item = u64>) -> CutBag {
        let mut b = CutBag::new();
        for v in vals {
            b.insert(v);
        }
        b
    }

    pub fn insert(&mut self, v: u64) {
        *self.0.entry(v).or_insert(0) += 1;
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.values().sum()
    }

    /// Elements sorted largest first.
    pub fn descending(&self) -> Vec<u64> {
        self.0.iter().rev().flat_map(|(&v, &n)| std::iter::repeat(v).take(n)).collect()
    }
}

impl Ord for CutBag {
    /// Dershowitz-Manna order; over naturals this is the lexicographic order
    /// of the descending sorted sequences.
    fn cmp(&self, other: &Self) -> Ordering {
        self.descending().cmp(&other.descending())
    }
}

impl PartialOrd for CutBag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CutBag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.descending().iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl fmt::Debug for CutBag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for CutBag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn height(t: &Term) -> u64 {
    match t {
        Term::Id(..) | Term::Axiom { .. } => 1,
        Term::Case { branches, .. } => 1 + branches.iter().map(|(_, b)| height(b)).max().unwrap_or(0),
        Term::Select { body, .. } | Term::Split { body, .. } => 1 + height(body),
        Term::Fork { arms, .. } => 1 + arms.iter().map(|a| height(&a.body)).sum::<u64>(),
        Term::Cut { left, right, .. } => height(left) + height(right),
    }
}

/// One entry per cut node, valued at the height of that cut.
pub fn cut_bag(t: &Term) -> CutBag {
    let mut bag = CutBag::new();
    fn go(t: &Term, bag: &mut CutBag) -> u64 {
        let h = match t {
            Term::Id(..) | Term::Axiom { .. } => 1,
            Term::Case { branches, .. } => 1 + branches.iter().map(|(_, b)| go(b, bag)).max().unwrap_or(0),
            Term::Select { body, .. } | Term::Split { body, .. } => 1 + go(body, bag),
            Term::Fork { arms, .. } => 1 + arms.iter().map(|a| go(&a.body, bag)).sum::<u64>(),
            Term::Cut { left, right, .. } => {
                let h = go(left, bag) + go(right, bag);
                bag.insert(h);
                h
            }
        };
        h
    }
    go(t, &mut bag);
    bag
}

/// True iff `b` is strictly above `a` in the multiset ordering.
pub fn bag_less(a: &CutBag, b: &CutBag) -> bool {
    a < b
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrowKind {
    Reduction,
    Conversion,
}

/// The bag attached to one rewriting arrow.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ArrowMeasure {
    pub bag: CutBag,
    pub kind: ArrowKind,
}

/// Reductions take the smaller endpoint bag, conversions the larger.
pub fn arrow_measure(before: &Term, after: &Term, kind: ArrowKind) -> ArrowMeasure {
    let (x, y) = (cut_bag(before), cut_bag(after));
    let bag = match kind {
        ArrowKind::Reduction => x.min(y),
        ArrowKind::Conversion => x.max(y),
    };
    ArrowMeasure { bag, kind }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bag(v: &[u64]) -> CutBag {
        CutBag::from_values(v.iter().copied())
    }

    #[test]
    fn reference_bag_examples() {
        assert!(bag_less(&bag(&[2, 2, 2, 1]), &bag(&[3])));
        assert!(bag_less(&bag(&[7]), &bag(&[7, 3])));
        assert!(bag_less(&bag(&[5, 1]), &bag(&[5, 2])));
        assert!(!bag_less(&bag(&[3]), &bag(&[2, 2, 2, 1])));
    }

    #[test]
    fn heights() {
        assert_eq!(height(&Term::id("a", "b")), 1);
        assert_eq!(height(&Term::select("a", "t", Term::id("b", "c"))), 2);
        let f = Term::fork("a", vec![("p", &[], Term::id("p", "x")), ("q", &[], Term::id("q", "y"))]);
        assert_eq!(height(&f), 3);
        assert_eq!(height(&Term::case("a", vec![])), 1);
    }

    #[test]
    fn bags_of_nested_cuts() {
        // heights f=2, g=3, h=1
        let f = Term::select("x", "t", Term::axiom("f", &["x"], &["g"]));
        let g = Term::select("y", "t", Term::select("y", "u", Term::axiom("g", &["g", "y"], &["d"])));
        let h = Term::axiom("h", &["d"], &["z"]);
        assert!(cut_bag(&f).is_empty());
        let inner = Term::cut("g", f, g);
        assert_eq!(cut_bag(&inner), bag(&[5]));
        let outer = Term::cut("d", inner, h);
        assert_eq!(cut_bag(&outer), bag(&[6, 5]));
        assert_eq!(height(&outer), 6);
        assert_eq!(cut_bag(&outer).to_string(), "{6,5}");
    }

    #[test]
    fn arrow_measures() {
        let cutful = Term::cut("g", Term::axiom("f", &[], &["g"]), Term::axiom("h", &["g"], &[]));
        let free = Term::axiom("k", &[], &[]);
        assert_eq!(arrow_measure(&cutful, &free, ArrowKind::Reduction).bag, CutBag::new());
        assert_eq!(arrow_measure(&cutful, &free, ArrowKind::Conversion).bag, bag(&[2]));
        assert_eq!(arrow_measure(&cutful, &cutful, ArrowKind::Conversion).bag, bag(&[2]));
    }
}
