//! Process terms for multiplicative-additive linear logic.
//!
//! Terms are parsed from two concrete syntaxes, typechecked against
//! channel-annotated sequents, normalized by cut elimination and compared
//! up to the permuting conversions.

pub mod core;
pub mod measure;
pub mod surface;
pub mod checker;
pub mod rewriter;
pub mod prover;
pub mod equiv;
pub mod generate;
pub mod lawcheck;
pub mod cli;
