//! λY-terms: syntax, simple types, head reduction and Böhm-tree prefixes.

mod bohm;
mod parse;
mod reduce;
mod term;
mod types;

pub use bohm::{bohm_prefix, BohmPrefix};
pub use parse::{
    parse_declarations, parse_term, parse_term_file, parse_type, render_term_file, ParseError, Pos, TermFile,
};
pub use reduce::{contract_at, head_normal_form, head_step, redexes, Head, HeadResult, Hnf};
pub use term::{
    fresh_name, infer_simple_type, substitute, CanonicalTerm, PathStep, Term, TermError, TermKind, TermPath,
};
pub use types::{Signature, SimpleType};

pub(crate) use parse::is_ident_char;
