use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::CoreError;

/// True when `s` is a letter followed by letters, digits, `_` or `'`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

macro_rules! ident_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Result<Self, CoreError> {
                let s = s.into();
                if is_identifier(&s) {
                    Ok($name(s))
                } else {
                    Err(CoreError::BadIdentifier(s))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            /// Unchecked conversion for literals in code and tests.
            fn from(s: &str) -> Self {
                debug_assert!(is_identifier(s), "bad identifier {s:?}");
                $name(s.to_string())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

ident_type!(
    /// A channel name. Totally ordered so canonical forms are deterministic.
    Chan
);
ident_type!(
    /// An event tag on a sum or product component.
    Tag
);

/// Returns `base` with primes appended until it is not in `used`.
pub fn fresh_primed(base: &Chan, used: &BTreeSet<Chan>) -> Chan {
    let mut s = base.0.clone();
    loop {
        s.push('\'');
        let c = Chan(s.clone());
        if !used.contains(&c) {
            return c;
        }
    }
}

/// Returns the first of `prefix1`, `prefix2`, ... that is not in `used`.
pub fn fresh_numbered(prefix: &str, used: &BTreeSet<Chan>) -> Chan {
    (1..)
        .map(|i| Chan(format!("{prefix}{i}")))
        .find(|c| !used.contains(c))
        .expect("unbounded range")
}
