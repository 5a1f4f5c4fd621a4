use std::fmt;

use super::reduce::{head_normal_form, Head, HeadResult};
use super::term::Term;

/// A finite prefix of a Böhm tree over a tree signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BohmPrefix {
    Node {
        label: String,
        children: Vec<BohmPrefix>,
    },
    /// Head reduction was shown to cycle.
    Omega,
    /// Depth or fuel ran out.
    Cutoff,
}

/// Unfolds the Böhm tree of a closed term of type `o` down to `depth` nodes
/// along every branch, spending at most `fuel` head steps per node.
pub fn bohm_prefix(t: &Term, depth: usize, fuel: usize) -> BohmPrefix {
    if depth == 0 {
        return BohmPrefix::Cutoff;
    }
    match head_normal_form(t, fuel) {
        HeadResult::Exhausted => BohmPrefix::Cutoff,
        HeadResult::Diverges => BohmPrefix::Omega,
        HeadResult::Hnf(h) => {
            let label = match h.head {
                Head::Const(c) => c,
                Head::Var(x) => panic!("bohm_prefix on an open term (free variable `{x}`)"),
            };
            assert!(h.binders.is_empty(), "bohm_prefix on a term of functional type");
            let children = h.args.iter().map(|a| bohm_prefix(a, depth - 1, fuel)).collect();
            BohmPrefix::Node { label, children }
        }
    }
}

impl BohmPrefix {
    /// The same tree with every node below `depth` replaced by a cutoff.
    pub fn truncate(&self, depth: usize) -> BohmPrefix {
        if depth == 0 {
            return BohmPrefix::Cutoff;
        }
        match self {
            BohmPrefix::Node { label, children } => BohmPrefix::Node {
                label: label.clone(),
                children: children.iter().map(|c| c.truncate(depth - 1)).collect(),
            },
            other => other.clone(),
        }
    }

    pub fn has_cutoff(&self) -> bool {
        match self {
            BohmPrefix::Cutoff => true,
            BohmPrefix::Omega => false,
            BohmPrefix::Node { children, .. } => children.iter().any(BohmPrefix::has_cutoff),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            BohmPrefix::Node { children, .. } => {
                1 + children.iter().map(BohmPrefix::node_count).sum::<usize>()
            }
            _ => 1,
        }
    }

    /// For a tree whose nodes have at most one child: the labels along the
    /// branch separated by spaces, with `Ω` for divergence and cutoffs omitted.
    pub fn word(&self) -> Option<String> {
        let mut parts = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                BohmPrefix::Cutoff => break,
                BohmPrefix::Omega => {
                    parts.push("Ω".to_string());
                    break;
                }
                BohmPrefix::Node { label, children } => {
                    parts.push(label.clone());
                    match children.as_slice() {
                        [] => break,
                        [only] => cur = only,
                        _ => return None,
                    }
                }
            }
        }
        Some(parts.join(" "))
    }
}

/// Tree notation: `a(b(c), Ω)`, with `_` for a cutoff.
impl fmt::Display for BohmPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BohmPrefix::Cutoff => write!(f, "_"),
            BohmPrefix::Omega => write!(f, "Ω"),
            BohmPrefix::Node { label, children } => {
                write!(f, "{label}")?;
                if !children.is_empty() {
                    write!(f, "(")?;
                    for (i, c) in children.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{c}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::parse_term;
    use crate::syntax::Signature;

    fn sig() -> Signature {
        Signature::new()
            .with("a", 1)
            .with("b", 1)
            .with("c", 0)
            .with("d", 2)
    }

    const YFN: &str = "(Y F:((o -> o) -> o). \\g:(o -> o). g (b (F (\\x:o. g (g x))))) a";

    #[test]
    fn doubling_word() {
        let t = parse_term(YFN, &sig()).unwrap();
        let p = bohm_prefix(&t, 12, 10_000);
        assert_eq!(p.word().unwrap(), "a b a a b a a a a b a a");
    }

    #[test]
    fn twice_prefix() {
        let t = parse_term("(\\f:(o->o). \\x:o. f (f x)) a c", &sig()).unwrap();
        assert_eq!(bohm_prefix(&t, 4, 100).to_string(), "a(a(c))");
        assert_eq!(bohm_prefix(&t, 2, 100).to_string(), "a(a(_))");
    }

    #[test]
    fn omega_leaf() {
        let t = parse_term("Y x:o. x", &sig()).unwrap();
        assert_eq!(bohm_prefix(&t, 5, 100), BohmPrefix::Omega);
        let t = parse_term("d (Y x:o. x) c", &sig()).unwrap();
        assert_eq!(bohm_prefix(&t, 5, 100).to_string(), "d(Ω, c)");
    }

    #[test]
    fn truncation_is_monotone() {
        let t = parse_term(YFN, &sig()).unwrap();
        let deep = bohm_prefix(&t, 10, 10_000);
        for d in 0..10 {
            assert_eq!(bohm_prefix(&t, d, 10_000), deep.truncate(d));
        }
    }
}
