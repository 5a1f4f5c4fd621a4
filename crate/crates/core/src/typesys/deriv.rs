use std::fmt;

use super::types::ITypeSet;
use crate::automaton::StateSet;
use crate::syntax::TermPath;

/// `≥` for typing judgments, `≱` for their duals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn symbol(self) -> &'static str {
        match self {
            Polarity::Pos => "≥",
            Polarity::Neg => "≱",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Rule {
    Axiom,
    Intersect,
    Subsume,
    ConstNullary,
    ConstTrans,
    App,
    Abs,
    YOdd,
    YEven,
}

impl Rule {
    pub const ALL: [Rule; 9] = [
        Rule::Axiom,
        Rule::Intersect,
        Rule::Subsume,
        Rule::ConstNullary,
        Rule::ConstTrans,
        Rule::App,
        Rule::Abs,
        Rule::YOdd,
        Rule::YEven,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Axiom => "Axiom",
            Rule::Intersect => "Intersect",
            Rule::Subsume => "Subsume",
            Rule::ConstNullary => "ConstNullary",
            Rule::ConstTrans => "ConstTrans",
            Rule::App => "App",
            Rule::Abs => "Abs",
            Rule::YOdd => "YOdd",
            Rule::YEven => "YEven",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Extra data a rule instance carries beyond its premises.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Witness {
    None,
    /// The transition tuple used by a positive `ConstTrans`.
    Tuple(Vec<StateSet>),
    /// The bound type of an `Abs`.
    Binder(ITypeSet),
    /// Stratum and the two parts of a fixpoint-introduction rule.
    Split {
        k: usize,
        s: ITypeSet,
        t: ITypeSet,
    },
}

/// `Γ ⊢ M ≥ S` (or `≱`), with `M` given by its position in the root term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Judgment {
    pub env: Vec<(String, ITypeSet)>,
    pub path: TermPath,
    pub polarity: Polarity,
    pub set: ITypeSet,
}

impl Judgment {
    pub fn lookup(&self, x: &str) -> Option<&ITypeSet> {
        self.env.iter().find(|(y, _)| y == x).map(|(_, s)| s)
    }
}

/// Environment with `x` bound to `s`, replacing an earlier binding of `x`.
pub fn extend_env(env: &[(String, ITypeSet)], x: &str, s: ITypeSet) -> Vec<(String, ITypeSet)> {
    let mut out: Vec<(String, ITypeSet)> = env.iter().filter(|(y, _)| y != x).cloned().collect();
    out.push((x.to_string(), s));
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    pub rule: Rule,
    pub judgment: Judgment,
    pub witness: Witness,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(Derivation::depth).max().unwrap_or(0)
    }

    /// Node at a position given as premise indices from the root.
    pub fn node(&self, at: &[usize]) -> Option<&Derivation> {
        match at.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.premises.get(i)?.node(rest),
        }
    }

    pub fn node_mut(&mut self, at: &[usize]) -> Option<&mut Derivation> {
        match at.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.premises.get_mut(i)?.node_mut(rest),
        }
    }

    /// Positions of all nodes in pre-order.
    pub fn positions(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![(self, Vec::new())];
        while let Some((d, pos)) = stack.pop() {
            for (i, p) in d.premises.iter().enumerate().rev() {
                let mut q = pos.clone();
                q.push(i);
                stack.push((p, q));
            }
            out.push(pos);
        }
        out
    }

    pub fn rules_used(&self) -> Vec<Rule> {
        let mut out = Vec::new();
        self.walk(&mut |d| {
            if !out.contains(&d.rule) {
                out.push(d.rule);
            }
        });
        out
    }

    fn walk(&self, f: &mut impl FnMut(&Derivation)) {
        f(self);
        for p in &self.premises {
            p.walk(f);
        }
    }
}

/// Display form of a node position: `root`, `0`, `0.2.1`, ...
pub fn format_position(pos: &[usize]) -> String {
    if pos.is_empty() {
        "root".to_string()
    } else {
        pos.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
    }
}
