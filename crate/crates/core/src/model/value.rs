use std::cell::OnceCell;
use std::fmt;
use std::rc::Rc;

use crate::automaton::StateSet;
use crate::syntax::{SimpleType, Term};

/// A fully evaluated element of some `D^k_A`.
///
/// A table lists results in the element order of the domain lattice
/// `D^k_A`, so two points of the same `(k, A)` compare structurally.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Set(StateSet),
    Table(Rc<[Point]>),
}

impl Point {
    pub fn as_set(&self) -> StateSet {
        match self {
            Point::Set(s) => *s,
            Point::Table(_) => panic!("expected a base-type point"),
        }
    }

    pub fn table(&self) -> &[Point] {
        match self {
            Point::Table(t) => t,
            Point::Set(_) => panic!("expected a functional point"),
        }
    }

    /// Pointwise order; both points must belong to the same lattice.
    pub fn leq(&self, other: &Point) -> bool {
        match (self, other) {
            (Point::Set(a), Point::Set(b)) => a.is_subset(*b),
            (Point::Table(a), Point::Table(b)) => {
                a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.leq(y))
            }
            _ => panic!("comparing points of different types"),
        }
    }

    pub fn join(&self, other: &Point) -> Point {
        match (self, other) {
            (Point::Set(a), Point::Set(b)) => Point::Set(a.union(*b)),
            (Point::Table(a), Point::Table(b)) => {
                Point::Table(a.iter().zip(b.iter()).map(|(x, y)| x.join(y)).collect())
            }
            _ => panic!("joining points of different types"),
        }
    }

    pub fn meet(&self, other: &Point) -> Point {
        match (self, other) {
            (Point::Set(a), Point::Set(b)) => Point::Set(a.inter(*b)),
            (Point::Table(a), Point::Table(b)) => {
                Point::Table(a.iter().zip(b.iter()).map(|(x, y)| x.meet(y)).collect())
            }
            _ => panic!("meeting points of different types"),
        }
    }

    /// `d ∩ Q_k` at every leaf.
    pub fn restrict(&self, mask: StateSet) -> Point {
        match self {
            Point::Set(s) => Point::Set(s.inter(mask)),
            Point::Table(t) => Point::Table(t.iter().map(|p| p.restrict(mask)).collect()),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Set(s) => write!(f, "{s:?}"),
            Point::Table(t) => f.debug_list().entries(t.iter()).finish(),
        }
    }
}

/// Evaluation environment: a persistent list of bindings.
#[derive(Clone, Default)]
pub struct Env(Option<Rc<EnvNode>>);

struct EnvNode {
    name: String,
    value: Value,
    next: Env,
}

impl Env {
    pub fn new() -> Env {
        Env(None)
    }

    pub fn bind(&self, name: &str, value: Value) -> Env {
        Env(Some(Rc::new(EnvNode {
            name: name.to_string(),
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.name == name {
                return Some(&node.value);
            }
            cur = &node.next.0;
        }
        None
    }
}

/// A model element, possibly not yet tabulated. Values carry no stratum or
/// type; operations take both from the caller.
#[derive(Clone)]
pub enum Value {
    Point(Point),
    Lazy(Rc<Lazy>),
}

pub struct Lazy {
    pub(crate) kind: LazyKind,
    pub(crate) cache: OnceCell<Point>,
}

pub(crate) enum LazyKind {
    Closure {
        param: String,
        body: Term,
        env: Env,
    },
    /// A constant of positive arity applied to fewer arguments than its arity.
    Const {
        name: String,
        arity: usize,
        args: Vec<StateSet>,
    },
    /// `λ_. v`
    Constant(Value),
    /// `d ⇒ e`, or `d ⇘ e` when `co` is set.
    Step {
        premise: Value,
        result: Value,
        co: bool,
    },
    Join(Vec<Value>),
    Meet(Vec<Value>),
    /// `v↓` of a value one stratum up
    Down(Value),
    /// `v↑inf` of a value one stratum down
    UpInf(Value),
    /// `v↑sup` of a value one stratum down
    UpSup(Value),
    Bar(Value),
}

impl Value {
    pub(crate) fn lazy(kind: LazyKind) -> Value {
        Value::Lazy(Rc::new(Lazy {
            kind,
            cache: OnceCell::new(),
        }))
    }

    pub fn set(s: StateSet) -> Value {
        Value::Point(Point::Set(s))
    }

    /// The state set of a base-type value.
    pub fn as_set(&self) -> StateSet {
        match self {
            Value::Point(p) => p.as_set(),
            Value::Lazy(_) => panic!("base-type values are always evaluated"),
        }
    }

    pub fn as_point(&self) -> Option<&Point> {
        match self {
            Value::Point(p) => Some(p),
            Value::Lazy(l) => l.cache.get(),
        }
    }
}

impl From<Point> for Value {
    fn from(p: Point) -> Value {
        Value::Point(p)
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Point(p) => write!(f, "{p:?}"),
            Value::Lazy(l) => match l.cache.get() {
                Some(p) => write!(f, "{p:?}"),
                None => write!(f, "<lazy>"),
            },
        }
    }
}

/// The type `A` of the argument and `B` of the result of an arrow type.
pub(crate) fn split_arrow(ty: &SimpleType) -> (&SimpleType, &SimpleType) {
    ty.as_arrow().expect("functional type expected")
}
