//! Formulas, sequents, terms and signatures, plus the channel bookkeeping
//! every other module relies on.

mod formula;
mod names;
mod sequent;
mod signature;
mod term;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use formula::{Connective, Formula};
pub use names::{fresh_numbered, fresh_primed, is_identifier, Chan, Tag};
pub use sequent::{Sequent, Side};
pub use signature::{AxiomType, Signature};
pub use term::{Arm, Path, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("not an identifier: {0:?}")]
    BadIdentifier(String),
    #[error("duplicate tag `{0}`")]
    DuplicateTag(Tag),
    #[error("duplicate channel `{0}`")]
    DuplicateChannel(Chan),
    #[error("channel `{0}` used as an interface more than once")]
    DuplicateInterface(Chan),
    #[error("rename is not injective: `{0}` hit twice")]
    NonInjectiveRename(Chan),
    #[error("axiom `{0}`: {1}")]
    BadAxiom(String, String),
}

/// Top-level channel names of both sides.
pub fn sequent_channels(s: &Sequent) -> BTreeSet<Chan> {
    s.channels()
}

pub fn free_channels(t: &Term) -> Result<BTreeSet<Chan>, CoreError> {
    t.free_channels()
}

pub fn rename_channels(t: &Term, m: &BTreeMap<Chan, Chan>) -> Result<Term, CoreError> {
    t.rename_channels(m)
}

pub fn canonicalize(t: &Term) -> Term {
    t.canonicalize()
}

pub fn subformula_count(s: &Sequent) -> usize {
    s.subformula_count()
}
