use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::formula::Formula;
use super::CoreError;

/// Typed arity of a non-logical axiom.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AxiomType {
    pub ins: Vec<Formula>,
    pub outs: Vec<Formula>,
}

/// The generating atoms and non-logical axioms. The empty signature gives
/// the initial logic.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Signature {
    pub atoms: BTreeSet<String>,
    pub axioms: IndexMap<String, AxiomType>,
}

impl Signature {
    pub fn empty() -> Signature {
        Signature::default()
    }

    pub fn add_atom(&mut self, name: &str) {
        self.atoms.insert(name.to_string());
    }

    /// Declares an axiom; its formulas may only mention declared atoms.
    pub fn add_axiom(&mut self, name: &str, ins: Vec<Formula>, outs: Vec<Formula>) -> Result<(), CoreError> {
        for x in ins.iter().chain(&outs) {
            x.validate()?;
            if let Some(a) = x.atoms().into_iter().find(|a| !self.atoms.contains(a)) {
                return Err(CoreError::BadAxiom(name.to_string(), format!("atom {a} is not declared")));
            }
        }
        if self.axioms.contains_key(name) {
            return Err(CoreError::BadAxiom(name.to_string(), "declared twice".into()));
        }
        self.axioms.insert(name.to_string(), AxiomType { ins, outs });
        Ok(())
    }

    pub fn axiom(&self, name: &str) -> Option<&AxiomType> {
        self.axioms.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    /// True when every axiom relates lists of atoms.
    pub fn is_atomic(&self) -> bool {
        self.axioms.values().all(|a| a.ins.iter().chain(&a.outs).all(Formula::is_atom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axioms_range_over_declared_atoms() {
        let mut sig = Signature::empty();
        sig.add_atom("A");
        assert!(sig.add_axiom("f", vec![Formula::atom("A")], vec![Formula::atom("A")]).is_ok());
        assert!(sig.add_axiom("g", vec![Formula::atom("B")], vec![]).is_err());
        assert!(sig.is_atomic());
        let pair = Formula::tensor(vec![("x_1".into(), Formula::atom("A")), ("x_2".into(), Formula::one())]).unwrap();
        assert!(sig.add_axiom("h", vec![], vec![pair]).is_ok());
        assert!(!sig.is_atomic());
        assert!(sig.add_axiom("f", vec![], vec![]).is_err());
    }
}
