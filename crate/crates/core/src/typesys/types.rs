use std::collections::BTreeSet;
use std::fmt;

use crate::automaton::{StateSet, Waa};
use crate::syntax::SimpleType;

/// An intersection type: a state, or `T → t` with a set of premises.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum IType {
    State(usize),
    Arrow(ITypeSet, Box<IType>),
}

/// A finite set of intersection types over one simple type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ITypeSet(pub BTreeSet<IType>);

impl IType {
    pub fn arrow(premises: ITypeSet, target: IType) -> IType {
        IType::Arrow(premises, Box::new(target))
    }

    /// The rank of the final target state.
    pub fn stratum(&self, waa: &Waa) -> usize {
        match self {
            IType::State(q) => waa.rank(*q),
            IType::Arrow(_, t) => t.stratum(waa),
        }
    }

    /// The final target state.
    pub fn target_state(&self) -> usize {
        match self {
            IType::State(q) => *q,
            IType::Arrow(_, t) => t.target_state(),
        }
    }

    /// `self ⊑ other`.
    pub fn subsumed_by(&self, other: &IType) -> bool {
        match (self, other) {
            (IType::State(p), IType::State(q)) => p == q,
            (IType::Arrow(s1, s), IType::Arrow(t1, t)) => t1.subsumed_by(s1) && s.subsumed_by(t),
            _ => false,
        }
    }

    /// Checks that the type lives over `ty` and that premises never exceed
    /// the stratum of their target.
    pub fn well_formed(&self, ty: &SimpleType, waa: &Waa) -> Result<(), String> {
        match (self, ty.as_arrow()) {
            (IType::State(q), None) => {
                if *q < waa.num_states() {
                    Ok(())
                } else {
                    Err(format!("unknown state #{q}"))
                }
            }
            (IType::Arrow(u, t), Some((a, b))) => {
                t.well_formed(b, waa)?;
                u.well_formed(a, waa)?;
                let k = t.stratum(waa);
                for p in u.iter() {
                    if p.stratum(waa) > k {
                        return Err(format!(
                            "premise of stratum {} above target stratum {k}",
                            p.stratum(waa)
                        ));
                    }
                }
                Ok(())
            }
            _ => Err(format!("type does not fit simple type {ty}")),
        }
    }

    pub fn display<'a>(&'a self, waa: &'a Waa) -> DisplayType<'a> {
        DisplayType { t: self, waa }
    }
}

impl ITypeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(t: IType) -> Self {
        ITypeSet([t].into_iter().collect())
    }

    pub fn states(s: StateSet) -> Self {
        ITypeSet(s.iter().map(IType::State).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &IType> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: &IType) -> bool {
        self.0.contains(t)
    }

    pub fn insert(&mut self, t: IType) -> bool {
        self.0.insert(t)
    }

    pub fn union(&self, other: &ITypeSet) -> ITypeSet {
        ITypeSet(self.0.union(&other.0).cloned().collect())
    }

    /// The states of a base-type set; `None` if it contains arrows.
    pub fn as_states(&self) -> Option<StateSet> {
        self.iter()
            .map(|t| match t {
                IType::State(q) => Some(*q),
                IType::Arrow(..) => None,
            })
            .collect()
    }

    /// `self ⊑ other`: every element is below some element of `other`.
    pub fn subsumed_by(&self, other: &ITypeSet) -> bool {
        self.iter().all(|s| other.iter().any(|t| s.subsumed_by(t)))
    }

    /// `S(T) = {t : (U → t) ∈ S, U ⊑ T}`.
    pub fn apply(&self, arg: &ITypeSet) -> ITypeSet {
        ITypeSet(
            self.iter()
                .filter_map(|s| match s {
                    IType::Arrow(u, t) if u.subsumed_by(arg) => Some((**t).clone()),
                    _ => None,
                })
                .collect(),
        )
    }

    /// `{U → t : t ∈ targets}`.
    pub fn arrows(premises: &ITypeSet, targets: &ITypeSet) -> ITypeSet {
        ITypeSet(
            targets
                .iter()
                .map(|t| IType::arrow(premises.clone(), t.clone()))
                .collect(),
        )
    }

    /// Elements of stratum at most `k`.
    pub fn restrict(&self, k: usize, waa: &Waa) -> ITypeSet {
        ITypeSet(self.iter().filter(|t| t.stratum(waa) <= k).cloned().collect())
    }

    pub fn max_stratum(&self, waa: &Waa) -> Option<usize> {
        self.iter().map(|t| t.stratum(waa)).max()
    }

    pub fn well_formed(&self, ty: &SimpleType, waa: &Waa) -> Result<(), String> {
        self.iter().try_for_each(|t| t.well_formed(ty, waa))
    }

    pub fn display<'a>(&'a self, waa: &'a Waa) -> DisplaySet<'a> {
        DisplaySet { s: self, waa }
    }
}

impl FromIterator<IType> for ITypeSet {
    fn from_iter<I: IntoIterator<Item = IType>>(iter: I) -> Self {
        ITypeSet(iter.into_iter().collect())
    }
}

pub struct DisplayType<'a> {
    t: &'a IType,
    waa: &'a Waa,
}

pub struct DisplaySet<'a> {
    s: &'a ITypeSet,
    waa: &'a Waa,
}

impl fmt::Display for DisplayType<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.t {
            IType::State(q) => write!(f, "{}", self.waa.name(*q)),
            IType::Arrow(u, t) => write!(f, "{}->{}", u.display(self.waa), t.display(self.waa)),
        }
    }
}

impl fmt::Display for DisplaySet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.s.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", t.display(self.waa))?;
        }
        write!(f, "}}")
    }
}

/// Parses `q`, `{q1}->q1`, `{{q1}->q1,{q1,q2}->q2}->q2`, ...
pub fn parse_itype(text: &str, waa: &Waa) -> Result<IType, String> {
    let mut p = TypeParser {
        s: text.as_bytes(),
        i: 0,
        text,
        waa,
    };
    let t = p.itype()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(format!("trailing input in type `{text}`"));
    }
    Ok(t)
}

/// Parses a set of types `{...}`.
pub fn parse_itype_set(text: &str, waa: &Waa) -> Result<ITypeSet, String> {
    let mut p = TypeParser {
        s: text.as_bytes(),
        i: 0,
        text,
        waa,
    };
    let t = p.set()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(format!("trailing input in type set `{text}`"));
    }
    Ok(t)
}

struct TypeParser<'a> {
    s: &'a [u8],
    i: usize,
    text: &'a str,
    waa: &'a Waa,
}

impl TypeParser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn set(&mut self) -> Result<ITypeSet, String> {
        if !self.eat(b'{') {
            return Err(format!("expected `{{` at offset {} in `{}`", self.i, self.text));
        }
        let mut out = ITypeSet::new();
        if self.eat(b'}') {
            return Ok(out);
        }
        loop {
            out.insert(self.itype()?);
            if self.eat(b',') {
                continue;
            }
            if self.eat(b'}') {
                return Ok(out);
            }
            return Err(format!(
                "expected `,` or `}}` at offset {} in `{}`",
                self.i, self.text
            ));
        }
    }

    fn itype(&mut self) -> Result<IType, String> {
        self.skip_ws();
        if self.s.get(self.i) == Some(&b'{') {
            let u = self.set()?;
            self.skip_ws();
            if !self.text[self.i..].starts_with("->") {
                return Err(format!("expected `->` at offset {} in `{}`", self.i, self.text));
            }
            self.i += 2;
            let t = self.itype()?;
            return Ok(IType::arrow(u, t));
        }
        let start = self.i;
        while self.i < self.s.len() {
            let c = self.text[self.i..].chars().next().unwrap();
            if crate::syntax::is_ident_char(c) {
                self.i += c.len_utf8();
            } else {
                break;
            }
        }
        let name = &self.text[start..self.i];
        if name.is_empty() {
            return Err(format!("expected a state at offset {start} in `{}`", self.text));
        }
        self.waa
            .index(name)
            .map(IType::State)
            .ok_or_else(|| format!("unknown state `{name}`"))
    }
}
