use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::names::{Chan, Tag};
use super::CoreError;

/// A protocol: atoms, tagged sums and products, channel-tagged tensors and pars.
///
/// The empty sum is `0`, the empty product `1`, the empty tensor `top` and the
/// empty par `bot`. Channel names inside tensors and pars are labels only:
/// [`Formula::same_type`] ignores them.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom(String),
    Sum(Vec<(Tag, Formula)>),
    Prod(Vec<(Tag, Formula)>),
    Tensor(Vec<(Chan, Formula)>),
    Par(Vec<(Chan, Formula)>),
}

/// The four connectives, used when a rule only cares about the shape.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Connective {
    Atom,
    Sum,
    Prod,
    Tensor,
    Par,
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn zero() -> Formula {
        Formula::Sum(vec![])
    }

    pub fn one() -> Formula {
        Formula::Prod(vec![])
    }

    pub fn top() -> Formula {
        Formula::Tensor(vec![])
    }

    pub fn bot() -> Formula {
        Formula::Par(vec![])
    }

    /// Builds a sum, rejecting repeated tags.
    pub fn sum(parts: Vec<(Tag, Formula)>) -> Result<Formula, CoreError> {
        check_tags(&parts)?;
        let f = Formula::Sum(parts);
        f.validate()?;
        Ok(f)
    }

    /// Builds a product, rejecting repeated tags.
    pub fn prod(parts: Vec<(Tag, Formula)>) -> Result<Formula, CoreError> {
        check_tags(&parts)?;
        let f = Formula::Prod(parts);
        f.validate()?;
        Ok(f)
    }

    /// Builds a tensor, rejecting repeated channel names anywhere inside.
    pub fn tensor(parts: Vec<(Chan, Formula)>) -> Result<Formula, CoreError> {
        let f = Formula::Tensor(parts);
        f.validate()?;
        Ok(f)
    }

    /// Builds a par, rejecting repeated channel names anywhere inside.
    pub fn par(parts: Vec<(Chan, Formula)>) -> Result<Formula, CoreError> {
        let f = Formula::Par(parts);
        f.validate()?;
        Ok(f)
    }

    pub fn connective(&self) -> Connective {
        match self {
            Formula::Atom(_) => Connective::Atom,
            Formula::Sum(_) => Connective::Sum,
            Formula::Prod(_) => Connective::Prod,
            Formula::Tensor(_) => Connective::Tensor,
            Formula::Par(_) => Connective::Par,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    /// Checks tag distinctness and channel distinctness for the whole tree.
    pub fn validate(&self) -> Result<(), CoreError> {
        let mut seen = BTreeSet::new();
        self.validate_into(&mut seen)
    }

    fn validate_into(&self, seen: &mut BTreeSet<Chan>) -> Result<(), CoreError> {
        match self {
            Formula::Atom(_) => Ok(()),
            Formula::Sum(ps) | Formula::Prod(ps) => {
                check_tags(ps)?;
                ps.iter().try_for_each(|(_, x)| x.validate_into(seen))
            }
            Formula::Tensor(ps) | Formula::Par(ps) => {
                for (c, x) in ps {
                    if !seen.insert(c.clone()) {
                        return Err(CoreError::DuplicateChannel(c.clone()));
                    }
                    x.validate_into(seen)?;
                }
                Ok(())
            }
        }
    }

    /// Every channel name nested anywhere inside the formula.
    pub fn nested_channels(&self) -> Vec<Chan> {
        let mut out = Vec::new();
        self.collect_channels(&mut out);
        out
    }

    fn collect_channels(&self, out: &mut Vec<Chan>) {
        match self {
            Formula::Atom(_) => {}
            Formula::Sum(ps) | Formula::Prod(ps) => {
                ps.iter().for_each(|(_, x)| x.collect_channels(out))
            }
            Formula::Tensor(ps) | Formula::Par(ps) => {
                for (c, x) in ps {
                    out.push(c.clone());
                    x.collect_channels(out);
                }
            }
        }
    }

    /// Tagged components of a sum or product.
    pub fn tagged(&self) -> Option<&[(Tag, Formula)]> {
        match self {
            Formula::Sum(ps) | Formula::Prod(ps) => Some(ps),
            _ => None,
        }
    }

    /// Channel-tagged components of a tensor or par.
    pub fn components(&self) -> Option<&[(Chan, Formula)]> {
        match self {
            Formula::Tensor(ps) | Formula::Par(ps) => Some(ps),
            _ => None,
        }
    }

    pub fn component_for_tag(&self, tag: &Tag) -> Option<&Formula> {
        self.tagged()?.iter().find(|(t, _)| t == tag).map(|(_, x)| x)
    }

    /// Number of subformula occurrences, the formula itself included.
    pub fn size(&self) -> usize {
        1 + match self {
            Formula::Atom(_) => 0,
            Formula::Sum(ps) | Formula::Prod(ps) => ps.iter().map(|(_, x)| x.size()).sum(),
            Formula::Tensor(ps) | Formula::Par(ps) => ps.iter().map(|(_, x)| x.size()).sum(),
        }
    }

    /// Atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Sum(ps) | Formula::Prod(ps) => {
                ps.iter().for_each(|(_, x)| x.collect_atoms(out))
            }
            Formula::Tensor(ps) | Formula::Par(ps) => {
                ps.iter().for_each(|(_, x)| x.collect_atoms(out))
            }
        }
    }

    /// Equality up to the channel labels inside tensors and pars.
    pub fn same_type(&self, other: &Formula) -> bool {
        match (self, other) {
            (Formula::Atom(a), Formula::Atom(b)) => a == b,
            (Formula::Sum(p), Formula::Sum(q)) | (Formula::Prod(p), Formula::Prod(q)) => {
                p.len() == q.len()
                    && p.iter().zip(q).all(|((s, x), (t, y))| s == t && x.same_type(y))
            }
            (Formula::Tensor(p), Formula::Tensor(q)) | (Formula::Par(p), Formula::Par(q)) => {
                p.len() == q.len() && p.iter().zip(q).all(|((_, x), (_, y))| x.same_type(y))
            }
            _ => false,
        }
    }

    /// Text form without channel labels; equal strings iff [`Formula::same_type`].
    pub fn type_key(&self) -> String {
        let mut s = String::new();
        self.write_key(&mut s);
        s
    }

    fn write_key(&self, s: &mut String) {
        match self {
            Formula::Atom(a) => s.push_str(a),
            Formula::Sum(ps) | Formula::Prod(ps) => {
                s.push(if matches!(self, Formula::Sum(_)) { '{' } else { '[' });
                for (i, (t, x)) in ps.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    s.push_str(t.as_str());
                    s.push(':');
                    x.write_key(s);
                }
                s.push(if matches!(self, Formula::Sum(_)) { '}' } else { ']' });
            }
            Formula::Tensor(ps) | Formula::Par(ps) => {
                s.push_str(if matches!(self, Formula::Tensor(_)) { "*(" } else { "%(" });
                for (i, (_, x)) in ps.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    x.write_key(s);
                }
                s.push(')');
            }
        }
    }

    /// Renames every tensor/par label to `<parent>_<i>` (1-based, recursively),
    /// adding primes when a name is already taken.
    pub fn relabel(&self, parent: &Chan, taken: &mut BTreeSet<Chan>) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Sum(ps) => Formula::Sum(
                ps.iter().map(|(t, x)| (t.clone(), x.relabel(parent, taken))).collect(),
            ),
            Formula::Prod(ps) => Formula::Prod(
                ps.iter().map(|(t, x)| (t.clone(), x.relabel(parent, taken))).collect(),
            ),
            Formula::Tensor(ps) | Formula::Par(ps) => {
                let parts = ps
                    .iter()
                    .enumerate()
                    .map(|(i, (_, x))| {
                        let mut name = Chan::from(format!("{parent}_{}", i + 1).as_str());
                        if taken.contains(&name) {
                            name = super::names::fresh_primed(&name, taken);
                        }
                        taken.insert(name.clone());
                        let inner = x.relabel(&name, taken);
                        (name, inner)
                    })
                    .collect();
                if matches!(self, Formula::Tensor(_)) {
                    Formula::Tensor(parts)
                } else {
                    Formula::Par(parts)
                }
            }
        }
    }
}

fn check_tags(parts: &[(Tag, Formula)]) -> Result<(), CoreError> {
    let mut seen = BTreeSet::new();
    for (t, _) in parts {
        if !seen.insert(t) {
            return Err(CoreError::DuplicateTag(t.clone()));
        }
    }
    Ok(())
}

impl fmt::Display for Formula {
    /// Prints in the ASCII grammar, with explicit channel labels.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Sum(ps) if ps.is_empty() => write!(f, "0"),
            Formula::Prod(ps) if ps.is_empty() => write!(f, "1"),
            Formula::Tensor(ps) if ps.is_empty() => write!(f, "top"),
            Formula::Par(ps) if ps.is_empty() => write!(f, "bot"),
            Formula::Sum(ps) | Formula::Prod(ps) => {
                let (l, r) = if matches!(self, Formula::Sum(_)) { ("{", "}") } else { ("[", "]") };
                write!(f, "{l}")?;
                for (i, (t, x)) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}:{x}")?;
                }
                write!(f, "{r}")
            }
            Formula::Tensor(ps) | Formula::Par(ps) => {
                let op = if matches!(self, Formula::Tensor(_)) { "*" } else { "%" };
                write!(f, "{op}(")?;
                for (i, (c, x)) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}:{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
