//! Weak alternating tree automata and game-based acceptance oracles.

mod game;
mod parse;
mod transform;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::Signature;

pub use game::{accept_prefix, parse_regular_tree, solve_regular, Mode, OracleError, RegularTree, WinTable};
pub use parse::parse_waa;
pub use transform::{dualize, monotone_completion, DEFAULT_DUAL_BOUND};

/// Maximum number of states an automaton may have.
pub const MAX_STATES: usize = 64;

/// A set of automaton states, as a bitmask over state indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet(pub u64);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn singleton(q: usize) -> StateSet {
        StateSet(1 << q)
    }

    pub fn contains(self, q: usize) -> bool {
        self.0 >> q & 1 == 1
    }

    pub fn insert(&mut self, q: usize) {
        self.0 |= 1 << q;
    }

    pub fn remove(&mut self, q: usize) {
        self.0 &= !(1 << q);
    }

    pub fn union(self, other: StateSet) -> StateSet {
        StateSet(self.0 | other.0)
    }

    pub fn inter(self, other: StateSet) -> StateSet {
        StateSet(self.0 & other.0)
    }

    pub fn minus(self, other: StateSet) -> StateSet {
        StateSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let q = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(q)
        })
    }

    /// All subsets of `self`, starting with the empty set.
    pub fn subsets(self) -> impl Iterator<Item = StateSet> {
        let full = self.0;
        let mut cur = 0u64;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = StateSet(cur);
            if cur == full {
                done = true;
            } else {
                cur = (cur.wrapping_sub(full)) & full;
            }
            Some(out)
        })
    }
}

impl FromIterator<usize> for StateSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = StateSet::EMPTY;
        for q in iter {
            s.insert(q);
        }
        s
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WaaError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("transition for `{state} {constant}` has a tuple of length {found}, expected {expected}")]
    ArityMismatch {
        state: String,
        constant: String,
        expected: usize,
        found: usize,
    },
    #[error("weakness violated in `{state} {constant}`: `{target}` has rank {target_rank} > {rank}")]
    Weakness {
        state: String,
        constant: String,
        target: String,
        rank: usize,
        target_rank: usize,
    },
    #[error("too many states ({0}, at most 64 supported)")]
    TooManyStates(usize),
    #[error("no states declared")]
    NoStates,
    #[error("dual transitions for `{state} {constant}` exceed the bound of {bound} tuples")]
    DualTooLarge {
        state: String,
        constant: String,
        bound: usize,
    },
}

/// Transition alternatives for one (state, constant) pair; each alternative is
/// a tuple of state sets with one component per argument.
pub type Alternatives = Vec<Vec<StateSet>>;

/// A weak alternating automaton over a tree signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Waa {
    names: Vec<String>,
    ranks: Vec<usize>,
    initial: usize,
    sig: Signature,
    delta: BTreeMap<(usize, String), Alternatives>,
}

impl Waa {
    /// Builds and validates an automaton. Tuples are deduplicated and sorted.
    pub fn new(
        states: Vec<(String, usize)>,
        initial: usize,
        sig: Signature,
        delta: BTreeMap<(usize, String), Alternatives>,
    ) -> Result<Waa, WaaError> {
        if states.is_empty() {
            return Err(WaaError::NoStates);
        }
        if states.len() > MAX_STATES {
            return Err(WaaError::TooManyStates(states.len()));
        }
        let mut names = Vec::new();
        let mut ranks = Vec::new();
        for (n, r) in states {
            if names.contains(&n) {
                return Err(WaaError::DuplicateState(n));
            }
            names.push(n);
            ranks.push(r);
        }
        assert!(initial < names.len(), "initial state out of range");
        let mut waa = Waa {
            names,
            ranks,
            initial,
            sig,
            delta: BTreeMap::new(),
        };
        for ((q, a), mut alts) in delta {
            assert!(q < waa.names.len(), "state index out of range");
            let arity = waa
                .sig
                .arity(&a)
                .ok_or_else(|| WaaError::UnknownConstant(a.clone()))?;
            for tuple in &alts {
                if tuple.len() != arity {
                    return Err(WaaError::ArityMismatch {
                        state: waa.names[q].clone(),
                        constant: a.clone(),
                        expected: arity,
                        found: tuple.len(),
                    });
                }
                for s in tuple {
                    for p in s.iter() {
                        if p >= waa.names.len() {
                            return Err(WaaError::UnknownState(format!("#{p}")));
                        }
                        if waa.ranks[p] > waa.ranks[q] {
                            return Err(WaaError::Weakness {
                                state: waa.names[q].clone(),
                                constant: a.clone(),
                                target: waa.names[p].clone(),
                                rank: waa.ranks[q],
                                target_rank: waa.ranks[p],
                            });
                        }
                    }
                }
            }
            alts.sort();
            alts.dedup();
            if !alts.is_empty() {
                waa.delta.insert((q, a), alts);
            }
        }
        Ok(waa)
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn rank(&self, q: usize) -> usize {
        self.ranks[q]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    pub fn all(&self) -> StateSet {
        (0..self.num_states()).collect()
    }

    /// `Q_k`.
    pub fn rank_eq(&self, k: usize) -> StateSet {
        (0..self.num_states()).filter(|&q| self.ranks[q] == k).collect()
    }

    /// `Q_{≤k}`.
    pub fn rank_le(&self, k: usize) -> StateSet {
        (0..self.num_states()).filter(|&q| self.ranks[q] <= k).collect()
    }

    /// States of even rank.
    pub fn even_states(&self) -> StateSet {
        (0..self.num_states())
            .filter(|&q| self.ranks[q].is_multiple_of(2))
            .collect()
    }

    /// Indices of all states ordered by name.
    pub fn states_by_name(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.num_states()).collect();
        v.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        v
    }

    pub fn transitions(&self, q: usize, a: &str) -> &[Vec<StateSet>] {
        self.delta
            .get(&(q, a.to_string()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn delta(&self) -> &BTreeMap<(usize, String), Alternatives> {
        &self.delta
    }

    /// States accepting a leaf labelled by the nullary constant `c`.
    pub fn nullary_accepting(&self, c: &str) -> StateSet {
        (0..self.num_states())
            .filter(|&q| !self.transitions(q, c).is_empty())
            .collect()
    }

    /// States `q` with some alternative of `δ(q, a)` whose components are
    /// contained in `args`.
    pub fn step_states(&self, a: &str, args: &[StateSet], among: StateSet) -> StateSet {
        among
            .iter()
            .filter(|&q| {
                self.transitions(q, a)
                    .iter()
                    .any(|t| t.iter().zip(args).all(|(s, p)| s.is_subset(*p)))
            })
            .collect()
    }

    pub fn parse_set(&self, text: &str) -> Result<StateSet, WaaError> {
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| WaaError::Syntax {
                line: 0,
                msg: format!("expected a state set, found `{text}`"),
            })?;
        let mut s = StateSet::EMPTY;
        for part in inner.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let q = self
                .index(part)
                .ok_or_else(|| WaaError::UnknownState(part.to_string()))?;
            s.insert(q);
        }
        Ok(s)
    }

    /// `{q1,q2}` with states in declaration order.
    pub fn fmt_set(&self, s: StateSet) -> String {
        let names: Vec<&str> = s.iter().map(|q| self.name(q)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// State names in `s` ordered by name.
    pub fn sorted_names(&self, s: StateSet) -> Vec<&str> {
        let mut v: Vec<&str> = s.iter().map(|q| self.name(q)).collect();
        v.sort();
        v
    }

    pub(crate) fn with_parts(
        &self,
        ranks: Vec<usize>,
        delta: BTreeMap<(usize, String), Alternatives>,
    ) -> Waa {
        Waa {
            names: self.names.clone(),
            ranks,
            initial: self.initial,
            sig: self.sig.clone(),
            delta,
        }
    }
}

/// Renders the automaton in the same line format [`parse_waa`] reads.
impl fmt::Display for Waa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let states: Vec<String> = (0..self.num_states())
            .map(|q| format!("{}@{}", self.names[q], self.ranks[q]))
            .collect();
        writeln!(f, "states: {}", states.join(" "))?;
        writeln!(f, "initial: {}", self.names[self.initial])?;
        for ((q, a), alts) in &self.delta {
            let rendered: Vec<String> = alts
                .iter()
                .map(|t| {
                    let comps: Vec<String> = t.iter().map(|s| self.fmt_set(*s)).collect();
                    format!("({})", comps.join(", "))
                })
                .collect();
            writeln!(f, "{} {} -> {}", self.names[*q], a, rendered.join(" | "))?;
        }
        Ok(())
    }
}
