use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Simple types over the single base type `o`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum SimpleType {
    Base,
    Arrow(Arc<SimpleType>, Arc<SimpleType>),
}

impl SimpleType {
    pub fn arrow(arg: SimpleType, result: SimpleType) -> SimpleType {
        SimpleType::Arrow(Arc::new(arg), Arc::new(result))
    }

    /// `o -> ... -> o` with `arity` arguments.
    pub fn first_order(arity: usize) -> SimpleType {
        (0..arity).fold(SimpleType::Base, |acc, _| {
            SimpleType::arrow(SimpleType::Base, acc)
        })
    }

    pub fn is_base(&self) -> bool {
        matches!(self, SimpleType::Base)
    }

    pub fn as_arrow(&self) -> Option<(&SimpleType, &SimpleType)> {
        match self {
            SimpleType::Base => None,
            SimpleType::Arrow(a, b) => Some((a, b)),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            SimpleType::Base => 0,
            SimpleType::Arrow(a, b) => (1 + a.order()).max(b.order()),
        }
    }

    /// Number of arguments before reaching the base type.
    pub fn arity(&self) -> usize {
        match self {
            SimpleType::Base => 0,
            SimpleType::Arrow(_, b) => 1 + b.arity(),
        }
    }

    /// Argument types in order.
    pub fn arguments(&self) -> Vec<&SimpleType> {
        let mut out = Vec::new();
        let mut cur = self;
        while let SimpleType::Arrow(a, b) = cur {
            out.push(a.as_ref());
            cur = b;
        }
        out
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Base => write!(f, "o"),
            SimpleType::Arrow(a, b) => {
                if a.is_base() {
                    write!(f, "o -> {b}")
                } else {
                    write!(f, "({a}) -> {b}")
                }
            }
        }
    }
}

/// A tree signature: constants of order at most one, stored by arity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, arity: usize) -> Self {
        self.insert(name, arity);
        self
    }

    pub fn insert(&mut self, name: &str, arity: usize) -> Option<usize> {
        self.arities.insert(name.to_string(), arity)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn type_of(&self, name: &str) -> Option<SimpleType> {
        self.arity(name).map(SimpleType::first_order)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arities.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.arities.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    /// Union of two signatures; `None` if a constant is declared with two arities.
    pub fn merge(&self, other: &Signature) -> Option<Signature> {
        let mut out = self.clone();
        for (name, arity) in other.iter() {
            if let Some(prev) = out.insert(name, arity) {
                if prev != arity {
                    return None;
                }
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_of_types() {
        let o = SimpleType::Base;
        let oo = SimpleType::arrow(o.clone(), o.clone());
        let tau1 = SimpleType::arrow(oo.clone(), oo.clone());
        assert_eq!(o.order(), 0);
        assert_eq!(oo.order(), 1);
        assert_eq!(tau1.order(), 2);
        assert_eq!(SimpleType::arrow(tau1.clone(), tau1.clone()).order(), 3);
        assert_eq!(tau1.to_string(), "(o -> o) -> o -> o");
    }

    #[test]
    fn first_order_constants() {
        let sig = Signature::new().with("a", 1).with("c", 0).with("d", 2);
        assert_eq!(sig.type_of("c"), Some(SimpleType::Base));
        assert_eq!(sig.type_of("d").unwrap().to_string(), "o -> o -> o");
        assert_eq!(sig.type_of("d").unwrap().order(), 1);
        assert!(sig.merge(&Signature::new().with("a", 2)).is_none());
    }
}
