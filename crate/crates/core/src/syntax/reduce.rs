use std::collections::{BTreeMap, HashSet};

use super::term::{subst, PathStep, Term, TermKind, TermPath};
use super::types::SimpleType;

/// Head symbol of a head normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    Var(String),
    Const(String),
}

/// `λx1...xn. h N1 ... Nk`.
#[derive(Clone, Debug)]
pub struct Hnf {
    pub binders: Vec<(String, SimpleType)>,
    pub head: Head,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug)]
pub enum HeadResult {
    Hnf(Hnf),
    /// Fuel ran out before a head normal form or a cycle was found.
    Exhausted,
    /// The head reduction sequence revisits a term up to α-equivalence.
    Diverges,
}

fn beta(abs: &Term, arg: &Term) -> Term {
    let TermKind::Abs(x, _, body) = abs.kind() else {
        unreachable!("beta on a non-abstraction")
    };
    let mut b = BTreeMap::new();
    b.insert(x.clone(), arg.clone());
    subst(body, &b)
}

fn delta(fix: &Term) -> Term {
    let lam = fix.fix_lambda().expect("delta on a non-fixpoint");
    Term::mk(TermKind::App(lam, fix.clone()), fix.ty().clone())
}

fn rebuild_apps(head: Term, args: &[Term]) -> Term {
    args.iter().fold(head, |acc, a| {
        let ty = acc
            .ty()
            .as_arrow()
            .map(|(_, c)| c.clone())
            .expect("well-typed spine");
        Term::mk(TermKind::App(acc, a.clone()), ty)
    })
}

/// One leftmost head β- or δ-step under the leading λ-prefix; `None` when the
/// term is already in head normal form.
pub fn head_step(t: &Term) -> Option<Term> {
    match t.kind() {
        TermKind::Abs(x, a, body) => {
            let body2 = head_step(body)?;
            Some(Term::mk(
                TermKind::Abs(x.clone(), a.clone(), body2),
                t.ty().clone(),
            ))
        }
        _ => {
            let (head, args) = t.spine();
            match head.kind() {
                TermKind::Abs(..) if !args.is_empty() => {
                    let reduced = beta(&head, &args[0]);
                    Some(rebuild_apps(reduced, &args[1..]))
                }
                TermKind::Fix(..) => Some(rebuild_apps(delta(&head), &args)),
                _ => None,
            }
        }
    }
}

/// Head-reduces `t` for at most `fuel` steps.
pub fn head_normal_form(t: &Term, fuel: usize) -> HeadResult {
    let mut seen = HashSet::new();
    let mut cur = t.clone();
    let mut steps = 0;
    loop {
        if !seen.insert(cur.canonical()) {
            return HeadResult::Diverges;
        }
        match head_step(&cur) {
            None => return HeadResult::Hnf(decompose(&cur)),
            Some(next) => {
                if steps == fuel {
                    return HeadResult::Exhausted;
                }
                steps += 1;
                cur = next;
            }
        }
    }
}

fn decompose(t: &Term) -> Hnf {
    let mut binders = Vec::new();
    let mut cur = t.clone();
    while let TermKind::Abs(x, a, body) = cur.kind() {
        binders.push((x.clone(), a.clone()));
        let next = body.clone();
        cur = next;
    }
    let (head, args) = cur.spine();
    let head = match head.kind() {
        TermKind::Var(x) => Head::Var(x.clone()),
        TermKind::Const(c) => Head::Const(c.clone()),
        _ => unreachable!("head normal form with a redex at its head"),
    };
    Hnf { binders, head, args }
}

/// Paths of every β- and δ-redex in `t`, in preorder.
pub fn redexes(t: &Term) -> Vec<TermPath> {
    fn go(t: &Term, path: &mut Vec<PathStep>, out: &mut Vec<TermPath>) {
        match t.kind() {
            TermKind::Var(_) | TermKind::Const(_) => {}
            TermKind::App(m, n) => {
                if matches!(m.kind(), TermKind::Abs(..)) {
                    out.push(TermPath(path.clone()));
                }
                path.push(PathStep::Fun);
                go(m, path, out);
                path.pop();
                path.push(PathStep::Arg);
                go(n, path, out);
                path.pop();
            }
            TermKind::Abs(_, _, b) => {
                path.push(PathStep::Body);
                go(b, path, out);
                path.pop();
            }
            TermKind::Fix(_, _, b) => {
                out.push(TermPath(path.clone()));
                path.push(PathStep::Body);
                go(b, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Contracts the redex at `path`; `None` if there is no redex there.
pub fn contract_at(t: &Term, path: &TermPath) -> Option<Term> {
    fn go(t: &Term, steps: &[PathStep]) -> Option<Term> {
        match steps.split_first() {
            None => match t.kind() {
                TermKind::App(m, n) if matches!(m.kind(), TermKind::Abs(..)) => Some(beta(m, n)),
                TermKind::Fix(..) => Some(delta(t)),
                _ => None,
            },
            Some((step, rest)) => {
                let kind = match (step, t.kind()) {
                    (PathStep::Fun, TermKind::App(m, n)) => TermKind::App(go(m, rest)?, n.clone()),
                    (PathStep::Arg, TermKind::App(m, n)) => TermKind::App(m.clone(), go(n, rest)?),
                    (PathStep::Body, TermKind::Abs(x, a, b)) => {
                        TermKind::Abs(x.clone(), a.clone(), go(b, rest)?)
                    }
                    (PathStep::Body, TermKind::Fix(x, a, b)) => {
                        TermKind::Fix(x.clone(), a.clone(), go(b, rest)?)
                    }
                    _ => return None,
                };
                Some(Term::mk(kind, t.ty().clone()))
            }
        }
    }
    go(t, &path.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::parse_term;
    use crate::syntax::term::infer_simple_type;
    use crate::syntax::Signature;

    fn sig() -> Signature {
        Signature::new().with("a", 1).with("b", 1).with("c", 0)
    }

    #[test]
    fn beta_step() {
        let t = parse_term("(\\x:o. x) c", &sig()).unwrap();
        assert_eq!(head_step(&t).unwrap().to_string(), "c");
        assert!(head_step(&parse_term("a ((\\x:o. x) c)", &sig()).unwrap()).is_none());
    }

    #[test]
    fn omega_loops_in_two_steps() {
        let t = parse_term("Y x:o. x", &sig()).unwrap();
        let s1 = head_step(&t).unwrap();
        assert_eq!(s1.to_string(), "(\\x:o. x) (Y x:o. x)");
        let s2 = head_step(&s1).unwrap();
        assert!(s2.alpha_eq(&t));
        assert!(matches!(head_normal_form(&t, 100), HeadResult::Diverges));
    }

    #[test]
    fn twice_applied() {
        let t = parse_term("(\\f:(o->o). \\x:o. f (f x)) a c", &sig()).unwrap();
        let HeadResult::Hnf(h) = head_normal_form(&t, 10) else {
            panic!()
        };
        assert_eq!(h.head, Head::Const("a".into()));
        assert_eq!(h.args.len(), 1);
        assert_eq!(h.args[0].to_string(), "a c");
        assert!(matches!(head_normal_form(&t, 1), HeadResult::Exhausted));
    }

    #[test]
    fn reducts_stay_well_typed() {
        let t = parse_term(
            "(Y F:((o -> o) -> o). \\g:(o -> o). g (b (F (\\x:o. g (g x))))) a",
            &sig(),
        )
        .unwrap();
        let mut cur = t;
        for _ in 0..40 {
            for p in redexes(&cur) {
                let r = contract_at(&cur, &p).unwrap();
                assert_eq!(infer_simple_type(&r).unwrap(), SimpleType::Base);
            }
            match head_step(&cur) {
                Some(n) => cur = n,
                None => {
                    let (_, args) = cur.spine();
                    cur = args[0].clone();
                }
            }
        }
    }
}
