//! Decide whether the Böhm tree of a simply-typed λY-term is accepted by a
//! weak alternating tree automaton.
//!
//! Three routes are provided and cross-checked against each other:
//!
//! * [`model`]: evaluation in a stratified finite model, where the value of
//!   a closed term of base type is exactly the set of accepting states;
//! * [`typesys`]: intersection-type certificates (positive and dual systems)
//!   generated from the model and validated by an independent syntactic
//!   checker;
//! * [`automaton`]: game-based oracles on finite Böhm-tree prefixes and on
//!   regular trees.

pub mod automaton;
pub mod cli;
pub mod model;
pub mod syntax;
pub mod typesys;

pub use automaton::{StateSet, Waa};
pub use model::{Model, ModelError, Value};
pub use syntax::{Signature, SimpleType, Term};
pub use typesys::{Derivation, IType, ITypeSet};
