use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::types::{Signature, SimpleType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type mismatch in {context}: expected {expected}, found {found}")]
    TypeMismatch {
        context: String,
        expected: SimpleType,
        found: SimpleType,
    },
    #[error("`{0}` is applied but is not a function")]
    NotAFunction(String),
    #[error("variable `{var}` is used at types {first} and {second}")]
    AnnotationConflict {
        var: String,
        first: SimpleType,
        second: SimpleType,
    },
}

/// A simply-typed λY-term. Every node caches its simple type.
#[derive(Clone)]
pub struct Term(Arc<TermNode>);

#[derive(Debug)]
pub struct TermNode {
    kind: TermKind,
    ty: SimpleType,
}

#[derive(Debug, Clone)]
pub enum TermKind {
    Var(String),
    Const(String),
    App(Term, Term),
    Abs(String, SimpleType, Term),
    /// `Y x:A. M`, i.e. `Y (λx:A. M)`.
    Fix(String, SimpleType, Term),
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Term {
    pub(crate) fn mk(kind: TermKind, ty: SimpleType) -> Term {
        Term(Arc::new(TermNode { kind, ty }))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn ty(&self) -> &SimpleType {
        &self.0.ty
    }

    pub fn var(name: &str, ty: SimpleType) -> Term {
        Term::mk(TermKind::Var(name.to_string()), ty)
    }

    pub fn constant(name: &str, sig: &Signature) -> Result<Term, TermError> {
        let ty = sig
            .type_of(name)
            .ok_or_else(|| TermError::UnknownConstant(name.to_string()))?;
        Ok(Term::mk(TermKind::Const(name.to_string()), ty))
    }

    pub fn app(fun: Term, arg: Term) -> Result<Term, TermError> {
        let (dom, cod) = match fun.ty().as_arrow() {
            Some((d, c)) => (d.clone(), c.clone()),
            None => return Err(TermError::NotAFunction(fun.to_string())),
        };
        if &dom != arg.ty() {
            return Err(TermError::TypeMismatch {
                context: format!("argument of `{fun}`"),
                expected: dom,
                found: arg.ty().clone(),
            });
        }
        Ok(Term::mk(TermKind::App(fun, arg), cod))
    }

    /// Left-nested application `head a1 ... an`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Result<Term, TermError> {
        args.into_iter().try_fold(head, Term::app)
    }

    pub fn abs(var: &str, ty: SimpleType, body: Term) -> Result<Term, TermError> {
        check_binder(var, &ty, &body)?;
        let whole = SimpleType::arrow(ty.clone(), body.ty().clone());
        Ok(Term::mk(TermKind::Abs(var.to_string(), ty, body), whole))
    }

    pub fn fix(var: &str, ty: SimpleType, body: Term) -> Result<Term, TermError> {
        check_binder(var, &ty, &body)?;
        if body.ty() != &ty {
            return Err(TermError::TypeMismatch {
                context: format!("body of `Y {var}`"),
                expected: ty,
                found: body.ty().clone(),
            });
        }
        Ok(Term::mk(TermKind::Fix(var.to_string(), ty.clone(), body), ty))
    }

    /// The undefined term at type `ty`, as the fixpoint of the identity.
    pub fn omega(ty: SimpleType) -> Term {
        let x = Term::var("x", ty.clone());
        Term::mk(TermKind::Fix("x".into(), ty.clone(), x), ty)
    }

    /// `Y M` normalized to `Y x. M x` with a fresh `x`.
    pub fn y_of(fun: Term) -> Result<Term, TermError> {
        let (dom, cod) = match fun.ty().as_arrow() {
            Some((d, c)) if d == c => (d.clone(), c.clone()),
            _ => return Err(TermError::NotAFunction(format!("Y applied to `{fun}`"))),
        };
        let _ = cod;
        let avoid = fun.free_vars();
        let x = fresh_name("y", |n| avoid.contains_key(n));
        let body = Term::app(fun, Term::var(&x, dom.clone()))?;
        Term::fix(&x, dom, body)
    }

    /// The λ-abstraction a fixpoint binds: `Y x.M` viewed as `λx.M`.
    pub fn fix_lambda(&self) -> Option<Term> {
        match self.kind() {
            TermKind::Fix(x, a, body) => Some(Term::mk(
                TermKind::Abs(x.clone(), a.clone(), body.clone()),
                SimpleType::arrow(a.clone(), a.clone()),
            )),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self.kind(), TermKind::Var(_))
    }

    /// Free variables with the type at which they occur. Conflicting
    /// annotations keep the first type seen; [`infer_simple_type`] reports them.
    pub fn free_vars(&self) -> BTreeMap<String, SimpleType> {
        let mut out = BTreeMap::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self.kind() {
            TermKind::Var(_) | TermKind::Const(_) => 1,
            TermKind::App(m, n) => 1 + m.size() + n.size(),
            TermKind::Abs(_, _, b) | TermKind::Fix(_, _, b) => 1 + b.size(),
        }
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (Term, Vec<Term>) {
        let mut args = Vec::new();
        let mut cur = self.clone();
        while let TermKind::App(m, n) = cur.kind() {
            args.push(n.clone());
            let next = m.clone();
            cur = next;
        }
        args.reverse();
        (cur, args)
    }

    /// Subterm at `path`; `None` if the path does not fit the term.
    pub fn at(&self, path: &TermPath) -> Option<Term> {
        let mut cur = self.clone();
        for step in &path.0 {
            let next = match (step, cur.kind()) {
                (PathStep::Fun, TermKind::App(m, _)) => m.clone(),
                (PathStep::Arg, TermKind::App(_, n)) => n.clone(),
                (PathStep::Body, TermKind::Abs(_, _, b)) => b.clone(),
                (PathStep::Body, TermKind::Fix(_, _, b)) => b.clone(),
                (PathStep::Lambda, TermKind::Fix(..)) => cur.fix_lambda()?,
                _ => return None,
            };
            cur = next;
        }
        Some(cur)
    }

    /// α-canonical form, used for hashing and α-equivalence.
    pub fn canonical(&self) -> CanonicalTerm {
        let mut scope = Vec::new();
        to_canonical(self, &mut scope)
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.ty() == other.ty() && self.canonical() == other.canonical()
    }
}

fn check_binder(var: &str, ty: &SimpleType, body: &Term) -> Result<(), TermError> {
    if let Some(found) = body.free_vars().get(var) {
        if found != ty {
            return Err(TermError::AnnotationConflict {
                var: var.to_string(),
                first: ty.clone(),
                second: found.clone(),
            });
        }
    }
    Ok(())
}

fn collect_free(t: &Term, bound: &mut Vec<String>, out: &mut BTreeMap<String, SimpleType>) {
    match t.kind() {
        TermKind::Var(x) => {
            if !bound.iter().any(|b| b == x) {
                out.entry(x.clone()).or_insert_with(|| t.ty().clone());
            }
        }
        TermKind::Const(_) => {}
        TermKind::App(m, n) => {
            collect_free(m, bound, out);
            collect_free(n, bound, out);
        }
        TermKind::Abs(x, _, b) | TermKind::Fix(x, _, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
    }
}

/// Recomputes the simple type of `t` from its annotations, checking every
/// application and that each free variable is used at a single type.
pub fn infer_simple_type(t: &Term) -> Result<SimpleType, TermError> {
    fn go(
        t: &Term,
        bound: &mut Vec<(String, SimpleType)>,
        free: &mut BTreeMap<String, SimpleType>,
    ) -> Result<SimpleType, TermError> {
        match t.kind() {
            TermKind::Var(x) => {
                let declared = bound.iter().rev().find(|(n, _)| n == x).map(|(_, ty)| ty.clone());
                let expected = match declared {
                    Some(ty) => ty,
                    None => free.entry(x.clone()).or_insert_with(|| t.ty().clone()).clone(),
                };
                if &expected != t.ty() {
                    return Err(TermError::AnnotationConflict {
                        var: x.clone(),
                        first: expected,
                        second: t.ty().clone(),
                    });
                }
                Ok(expected)
            }
            TermKind::Const(_) => Ok(t.ty().clone()),
            TermKind::App(m, n) => {
                let fm = go(m, bound, free)?;
                let an = go(n, bound, free)?;
                match fm.as_arrow() {
                    Some((d, c)) if *d == an => Ok(c.clone()),
                    Some((d, _)) => Err(TermError::TypeMismatch {
                        context: format!("argument of `{m}`"),
                        expected: d.clone(),
                        found: an,
                    }),
                    None => Err(TermError::NotAFunction(m.to_string())),
                }
            }
            TermKind::Abs(x, a, b) => {
                bound.push((x.clone(), a.clone()));
                let tb = go(b, bound, free);
                bound.pop();
                Ok(SimpleType::arrow(a.clone(), tb?))
            }
            TermKind::Fix(x, a, b) => {
                bound.push((x.clone(), a.clone()));
                let tb = go(b, bound, free);
                bound.pop();
                let tb = tb?;
                if &tb != a {
                    return Err(TermError::TypeMismatch {
                        context: format!("body of `Y {x}`"),
                        expected: a.clone(),
                        found: tb,
                    });
                }
                Ok(tb)
            }
        }
    }
    go(t, &mut Vec::new(), &mut BTreeMap::new())
}

/// A fresh name derived from `base` by appending primes.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut name = format!("{base}'");
    while taken(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding simultaneous substitution.
pub fn substitute(m: &Term, bindings: &BTreeMap<String, Term>) -> Result<Term, TermError> {
    check_substitution_types(m, bindings, &mut Vec::new())?;
    Ok(subst(m, bindings))
}

fn check_substitution_types(
    m: &Term,
    bindings: &BTreeMap<String, Term>,
    bound: &mut Vec<String>,
) -> Result<(), TermError> {
    match m.kind() {
        TermKind::Var(x) => {
            if bound.iter().any(|b| b == x) {
                return Ok(());
            }
            if let Some(r) = bindings.get(x) {
                if r.ty() != m.ty() {
                    return Err(TermError::TypeMismatch {
                        context: format!("substitution for `{x}`"),
                        expected: m.ty().clone(),
                        found: r.ty().clone(),
                    });
                }
            }
            Ok(())
        }
        TermKind::Const(_) => Ok(()),
        TermKind::App(a, b) => {
            check_substitution_types(a, bindings, bound)?;
            check_substitution_types(b, bindings, bound)
        }
        TermKind::Abs(x, _, b) | TermKind::Fix(x, _, b) => {
            bound.push(x.clone());
            let r = check_substitution_types(b, bindings, bound);
            bound.pop();
            r
        }
    }
}

/// Substitution without type checks; callers guarantee matching types.
pub(crate) fn subst(m: &Term, bindings: &BTreeMap<String, Term>) -> Term {
    if bindings.is_empty() {
        return m.clone();
    }
    match m.kind() {
        TermKind::Var(x) => bindings.get(x).cloned().unwrap_or_else(|| m.clone()),
        TermKind::Const(_) => m.clone(),
        TermKind::App(a, b) => Term::mk(
            TermKind::App(subst(a, bindings), subst(b, bindings)),
            m.ty().clone(),
        ),
        TermKind::Abs(x, ty, body) | TermKind::Fix(x, ty, body) => {
            let fv_body = body.free_vars();
            let inner: BTreeMap<String, Term> = bindings
                .iter()
                .filter(|(k, _)| *k != x && fv_body.contains_key(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            if inner.is_empty() {
                return m.clone();
            }
            let repl_fv: BTreeSet<String> = inner.values().flat_map(|t| t.free_vars().into_keys()).collect();
            let (x2, body2) = if repl_fv.contains(x) {
                let fresh = fresh_name(x, |n| {
                    repl_fv.contains(n) || fv_body.contains_key(n) || inner.contains_key(n)
                });
                let mut ren = BTreeMap::new();
                ren.insert(x.clone(), Term::var(&fresh, ty.clone()));
                (fresh, subst(body, &ren))
            } else {
                (x.clone(), body.clone())
            };
            let new_body = subst(&body2, &inner);
            let kind = match m.kind() {
                TermKind::Abs(..) => TermKind::Abs(x2, ty.clone(), new_body),
                _ => TermKind::Fix(x2, ty.clone(), new_body),
            };
            Term::mk(kind, m.ty().clone())
        }
    }
}

/// Locally nameless form: bound variables as de Bruijn indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CanonicalTerm {
    Bound(usize),
    Free(String),
    Const(String),
    App(Box<CanonicalTerm>, Box<CanonicalTerm>),
    Abs(SimpleType, Box<CanonicalTerm>),
    Fix(SimpleType, Box<CanonicalTerm>),
}

fn to_canonical(t: &Term, scope: &mut Vec<String>) -> CanonicalTerm {
    match t.kind() {
        TermKind::Var(x) => match scope.iter().rev().position(|b| b == x) {
            Some(i) => CanonicalTerm::Bound(i),
            None => CanonicalTerm::Free(x.clone()),
        },
        TermKind::Const(c) => CanonicalTerm::Const(c.clone()),
        TermKind::App(m, n) => {
            CanonicalTerm::App(Box::new(to_canonical(m, scope)), Box::new(to_canonical(n, scope)))
        }
        TermKind::Abs(x, a, b) | TermKind::Fix(x, a, b) => {
            scope.push(x.clone());
            let body = Box::new(to_canonical(b, scope));
            scope.pop();
            match t.kind() {
                TermKind::Abs(..) => CanonicalTerm::Abs(a.clone(), body),
                _ => CanonicalTerm::Fix(a.clone(), body),
            }
        }
    }
}

/// One step of a path into a term.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum PathStep {
    /// function part of an application (`f`)
    Fun,
    /// argument of an application (`a`)
    Arg,
    /// body of an abstraction or fixpoint (`b`)
    Body,
    /// a fixpoint `Y x.M` seen as `λx.M` (`l`)
    Lambda,
}

/// Position of a subterm, printed as `@` followed by `f`, `a`, `b`, `l`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct TermPath(pub Vec<PathStep>);

impl TermPath {
    pub fn root() -> Self {
        TermPath(Vec::new())
    }

    pub fn child(&self, step: PathStep) -> TermPath {
        let mut v = self.0.clone();
        v.push(step);
        TermPath(v)
    }

    pub fn parse(s: &str) -> Option<TermPath> {
        let rest = s.strip_prefix('@')?;
        rest.chars()
            .map(|c| match c {
                'f' => Some(PathStep::Fun),
                'a' => Some(PathStep::Arg),
                'b' => Some(PathStep::Body),
                'l' => Some(PathStep::Lambda),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(TermPath)
    }
}

impl fmt::Display for TermPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@")?;
        for s in &self.0 {
            let c = match s {
                PathStep::Fun => 'f',
                PathStep::Arg => 'a',
                PathStep::Body => 'b',
                PathStep::Lambda => 'l',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            TermKind::Var(x) | TermKind::Const(x) => write!(f, "{x}"),
            TermKind::App(m, n) => {
                match m.kind() {
                    TermKind::Abs(..) | TermKind::Fix(..) => write!(f, "({m})")?,
                    _ => write!(f, "{m}")?,
                }
                match n.kind() {
                    TermKind::Var(_) | TermKind::Const(_) => write!(f, " {n}"),
                    _ => write!(f, " ({n})"),
                }
            }
            TermKind::Abs(x, a, b) => write!(f, "\\{x}:{}. {b}", TypeAnnot(a)),
            TermKind::Fix(x, a, b) => write!(f, "Y {x}:{}. {b}", TypeAnnot(a)),
        }
    }
}

/// Binder annotations are parenthesized when they are arrows so the printed
/// form reads unambiguously.
struct TypeAnnot<'a>(&'a SimpleType);

impl fmt::Display for TypeAnnot<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_base() {
            write!(f, "o")
        } else {
            write!(f, "({})", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o() -> SimpleType {
        SimpleType::Base
    }

    fn oo() -> SimpleType {
        SimpleType::arrow(o(), o())
    }

    #[test]
    fn application_type_mismatch_is_rejected() {
        let sig = Signature::new().with("c", 0);
        let c = Term::constant("c", &sig).unwrap();
        assert!(matches!(Term::app(c.clone(), c), Err(TermError::NotAFunction(_))));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let sig = Signature::new().with("a", 1).with("c", 0);
        let f = Term::var("f", oo());
        let x = Term::var("x", o());
        let fx = Term::app(f, x).unwrap();
        let mut b = BTreeMap::new();
        b.insert("f".to_string(), Term::constant("a", &sig).unwrap());
        b.insert("x".to_string(), Term::constant("c", &sig).unwrap());
        assert_eq!(substitute(&fx, &b).unwrap().to_string(), "a c");
    }

    #[test]
    fn substitution_avoids_capture() {
        // (λx. x y)[y := x]  with x : o -> o  and  y : o
        let xt = Term::var("x", oo());
        let y = Term::var("y", o());
        let lam = Term::abs("x", oo(), Term::app(xt, y).unwrap()).unwrap();
        let mut b = BTreeMap::new();
        b.insert("y".to_string(), Term::var("x", o()));
        let r = substitute(&lam, &b).unwrap();
        assert_eq!(r.to_string(), "\\x':(o -> o). x' x");
    }

    #[test]
    fn substitution_of_fixpoint_term() {
        let x = Term::var("x", o());
        let yf = Term::omega(o());
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), yf.clone());
        assert!(substitute(&x, &b).unwrap().alpha_eq(&yf));
    }

    #[test]
    fn substitution_type_mismatch() {
        let x = Term::var("x", o());
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), Term::var("g", oo()));
        assert!(substitute(&x, &b).is_err());
    }

    #[test]
    fn binder_annotation_conflict() {
        let body = Term::var("x", oo());
        assert!(matches!(
            Term::abs("x", o(), body),
            Err(TermError::AnnotationConflict { .. })
        ));
    }

    #[test]
    fn free_variable_conflict_is_detected_by_inference() {
        let sig = Signature::new().with("d", 2);
        let d = Term::constant("d", &sig).unwrap();
        let x1 = Term::var("x", o());
        let f = Term::var("x", oo());
        let fx = Term::app(f, Term::var("y", o())).unwrap();
        let t = Term::apps(d, [x1, fx]).unwrap();
        assert!(matches!(
            infer_simple_type(&t),
            Err(TermError::AnnotationConflict { .. })
        ));
    }

    #[test]
    fn paths_resolve_lambda_view() {
        let x = Term::var("x", o());
        let omega = Term::fix("x", o(), x).unwrap();
        let lam = omega.at(&TermPath::parse("@l").unwrap()).unwrap();
        assert_eq!(lam.ty(), &oo());
        assert!(lam.at(&TermPath::parse("@b").unwrap()).unwrap().is_var());
        assert!(omega.at(&TermPath::parse("@f").unwrap()).is_none());
        assert_eq!(TermPath::parse("@lbfa").unwrap().to_string(), "@lbfa");
    }
}
