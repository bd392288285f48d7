use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::formula::Formula;
use super::names::Chan;
use super::CoreError;

/// Which side of the turnstile a channel sits on.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Dom,
    Cod,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Dom => Side::Cod,
            Side::Cod => Side::Dom,
        }
    }
}

/// Two channel-keyed contexts. Order is kept for printing only; equality
/// ignores it.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Sequent {
    pub dom: IndexMap<Chan, Formula>,
    pub cod: IndexMap<Chan, Formula>,
}

impl Sequent {
    pub fn empty() -> Sequent {
        Sequent::default()
    }

    /// Builds a sequent, checking that top-level names are distinct and do
    /// not collide with names nested inside any formula.
    pub fn new(
        dom: Vec<(Chan, Formula)>,
        cod: Vec<(Chan, Formula)>,
    ) -> Result<Sequent, CoreError> {
        let mut s = Sequent::empty();
        for (c, x) in dom {
            x.validate()?;
            if s.contains(&c) {
                return Err(CoreError::DuplicateChannel(c));
            }
            s.dom.insert(c, x);
        }
        for (c, x) in cod {
            x.validate()?;
            if s.contains(&c) {
                return Err(CoreError::DuplicateChannel(c));
            }
            s.cod.insert(c, x);
        }
        let mut nested = BTreeSet::new();
        for (_, _, x) in s.iter() {
            for c in x.nested_channels() {
                if s.contains(&c) || !nested.insert(c.clone()) {
                    return Err(CoreError::DuplicateChannel(c));
                }
            }
        }
        Ok(s)
    }

    pub fn side(&self, side: Side) -> &IndexMap<Chan, Formula> {
        match side {
            Side::Dom => &self.dom,
            Side::Cod => &self.cod,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut IndexMap<Chan, Formula> {
        match side {
            Side::Dom => &mut self.dom,
            Side::Cod => &mut self.cod,
        }
    }

    pub fn contains(&self, c: &Chan) -> bool {
        self.dom.contains_key(c) || self.cod.contains_key(c)
    }

    pub fn get(&self, c: &Chan) -> Option<(Side, &Formula)> {
        if let Some(x) = self.dom.get(c) {
            Some((Side::Dom, x))
        } else {
            self.cod.get(c).map(|x| (Side::Cod, x))
        }
    }

    /// All entries, domain first.
    pub fn iter(&self) -> impl Iterator<Item = (Side, &Chan, &Formula)> {
        self.dom
            .iter()
            .map(|(c, x)| (Side::Dom, c, x))
            .chain(self.cod.iter().map(|(c, x)| (Side::Cod, c, x)))
    }

    /// The top-level channel names of both sides.
    pub fn channels(&self) -> BTreeSet<Chan> {
        self.dom.keys().chain(self.cod.keys()).cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.dom.len() + self.cod.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total number of subformula occurrences.
    pub fn subformula_count(&self) -> usize {
        self.iter().map(|(_, _, x)| x.size()).sum()
    }

    /// Replaces the formula of `c` in place, keeping its position.
    pub fn replace(&mut self, c: &Chan, x: Formula) {
        if let Some(slot) = self.dom.get_mut(c) {
            *slot = x;
        } else if let Some(slot) = self.cod.get_mut(c) {
            *slot = x;
        }
    }

    /// Removes `c` and puts `parts` where it was, on the same side.
    pub fn splice(&mut self, c: &Chan, parts: Vec<(Chan, Formula)>) {
        let Some((side, _)) = self.get(c) else { return };
        let map = self.side_mut(side);
        let idx = map.get_index_of(c).expect("present");
        map.shift_remove(c);
        for (k, (p, x)) in parts.into_iter().enumerate() {
            map.shift_insert(idx + k, p, x);
        }
    }

    pub fn remove(&mut self, c: &Chan) -> Option<(Side, Formula)> {
        if let Some(x) = self.dom.shift_remove(c) {
            Some((Side::Dom, x))
        } else {
            self.cod.shift_remove(c).map(|x| (Side::Cod, x))
        }
    }

    /// The sub-sequent on the given channel names, in original order.
    pub fn restrict(&self, keep: &BTreeSet<Chan>) -> Sequent {
        Sequent {
            dom: self.dom.iter().filter(|(c, _)| keep.contains(*c)).map(|(c, x)| (c.clone(), x.clone())).collect(),
            cod: self.cod.iter().filter(|(c, _)| keep.contains(*c)).map(|(c, x)| (c.clone(), x.clone())).collect(),
        }
    }

    /// Equality up to tensor/par labels inside formulas.
    pub fn same_type(&self, other: &Sequent) -> bool {
        fn side_eq(a: &IndexMap<Chan, Formula>, b: &IndexMap<Chan, Formula>) -> bool {
            a.len() == b.len() && a.iter().all(|(c, x)| b.get(c).is_some_and(|y| x.same_type(y)))
        }
        side_eq(&self.dom, &other.dom) && side_eq(&self.cod, &other.cod)
    }

    /// Text form with entries sorted by name and labels erased.
    pub fn type_key(&self) -> String {
        let mut d: Vec<String> = self.dom.iter().map(|(c, x)| format!("{c}:{}", x.type_key())).collect();
        let mut e: Vec<String> = self.cod.iter().map(|(c, x)| format!("{c}:{}", x.type_key())).collect();
        d.sort();
        e.sort();
        format!("{}|-{}", d.join(","), e.join(","))
    }

    /// Renames top-level channels through `f`.
    pub fn rename(&self, f: impl Fn(&Chan) -> Chan) -> Sequent {
        Sequent {
            dom: self.dom.iter().map(|(c, x)| (f(c), x.clone())).collect(),
            cod: self.cod.iter().map(|(c, x)| (f(c), x.clone())).collect(),
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |m: &IndexMap<Chan, Formula>| {
            m.iter().map(|(c, x)| format!("{c}:{x}")).collect::<Vec<_>>().join(", ")
        };
        let (d, c) = (side(&self.dom), side(&self.cod));
        match (d.is_empty(), c.is_empty()) {
            (true, true) => write!(f, "|-"),
            (true, false) => write!(f, "|- {c}"),
            (false, true) => write!(f, "{d} |-"),
            (false, false) => write!(f, "{d} |- {c}"),
        }
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channels_of_distribution_sequent() {
        let wx = Formula::Sum(vec![("a".into(), Formula::atom("W")), ("b".into(), Formula::atom("X"))]);
        let yz = Formula::Par(vec![("b_1".into(), Formula::atom("Y")), ("b_2".into(), Formula::atom("Z"))]);
        let s = Sequent::new(
            vec![("a".into(), wx), ("a'".into(), Formula::atom("A"))],
            vec![("b".into(), yz)],
        )
        .unwrap();
        let names: Vec<String> = s.channels().iter().map(|c| c.to_string()).collect();
        assert_eq!(names, ["a", "a'", "b"]);
    }

    #[test]
    fn empty_and_unit_sequents() {
        assert!(Sequent::empty().channels().is_empty());
        let s = Sequent::new(vec![("g".into(), Formula::top())], vec![("d".into(), Formula::top())]).unwrap();
        assert_eq!(s.channels().len(), 2);
    }

    #[test]
    fn nested_collision_rejected() {
        let x = Formula::Tensor(vec![("b".into(), Formula::atom("A"))]);
        let r = Sequent::new(vec![("a".into(), x)], vec![("b".into(), Formula::atom("A"))]);
        assert_eq!(r, Err(CoreError::DuplicateChannel("b".into())));
    }

    #[test]
    fn subformula_counts() {
        let s = Sequent::new(vec![("a".into(), Formula::atom("A"))], vec![("b".into(), Formula::atom("A"))]).unwrap();
        assert_eq!(s.subformula_count(), 2);
        let wx = Formula::Sum(vec![("a".into(), Formula::atom("W")), ("b".into(), Formula::atom("X"))]);
        let s = Sequent::new(vec![("a".into(), wx)], vec![]).unwrap();
        assert_eq!(s.subformula_count(), 3);
        let s = Sequent::new(vec![], vec![("b".into(), Formula::top())]).unwrap();
        assert_eq!(s.subformula_count(), 1);
    }

    #[test]
    fn splice_keeps_position() {
        let mut s = Sequent::new(
            vec![("x".into(), Formula::atom("A")), ("y".into(), Formula::top()), ("z".into(), Formula::atom("B"))],
            vec![],
        )
        .unwrap();
        s.splice(&"y".into(), vec![("p".into(), Formula::one()), ("q".into(), Formula::zero())]);
        let keys: Vec<String> = s.dom.keys().map(|c| c.to_string()).collect();
        assert_eq!(keys, ["x", "p", "q", "z"]);
    }
}
