//! Intersection types over the states of an automaton, derivations in the
//! positive (`≥`) and dual (`≱`) systems, a syntactic checker and a
//! model-guided derivation builder.

mod check;
mod deriv;
mod derive;
mod format;
mod interp;
mod types;

pub use check::{check_derivation, scope_at, Violation};
pub use deriv::{extend_env, format_position, Derivation, Judgment, Polarity, Rule, Witness};
pub use derive::{decide, derive, derive_dual, dual_model, Certificate, DeriveError};
pub use format::{
    derivation_signature, parse_derivation, parse_derivation_file, render_derivation, render_derivation_file,
    DerivationParseError,
};
pub use interp::TypeModel;
pub use types::{parse_itype, parse_itype_set, DisplaySet, DisplayType, IType, ITypeSet};
