use std::fmt;

use super::deriv::{extend_env, format_position, Derivation, Polarity, Rule, Witness};
use super::types::{IType, ITypeSet};
use crate::automaton::{StateSet, Waa};
use crate::syntax::{PathStep, SimpleType, Term, TermKind, TermPath};

/// The first rule instance that fails to check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub position: Vec<usize>,
    pub path: TermPath,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "node {} ({} at {}): {}",
            format_position(&self.position),
            self.rule,
            self.path,
            self.message
        )
    }
}

impl std::error::Error for Violation {}

/// Checks every rule instance of `d` against the subterms of `term`.
/// Purely syntactic: the model is never consulted.
pub fn check_derivation(d: &Derivation, term: &Term, waa: &Waa) -> Result<(), Violation> {
    let mut pos = Vec::new();
    check_node(d, term, waa, &mut pos)
}

/// Variables bound above `path`, innermost last.
pub fn scope_at(term: &Term, path: &TermPath) -> Option<Vec<(String, SimpleType)>> {
    let mut scope = Vec::new();
    let mut cur = term.clone();
    for step in &path.0 {
        match (step, cur.kind()) {
            (PathStep::Body, TermKind::Abs(x, a, _)) | (PathStep::Body, TermKind::Fix(x, a, _)) => {
                scope.push((x.clone(), a.clone()));
            }
            _ => {}
        }
        cur = cur.at(&TermPath(vec![*step]))?;
    }
    Some(scope)
}

fn check_node(d: &Derivation, term: &Term, waa: &Waa, pos: &mut Vec<usize>) -> Result<(), Violation> {
    let fail = |message: String| Violation {
        position: pos.clone(),
        path: d.judgment.path.clone(),
        rule: d.rule,
        message,
    };
    let j = &d.judgment;
    let sub = term
        .at(&j.path)
        .ok_or_else(|| fail(format!("no subterm at {}", j.path)))?;
    let scope = scope_at(term, &j.path).expect("path resolved above");
    for (i, (x, s)) in j.env.iter().enumerate() {
        if j.env[..i].iter().any(|(y, _)| y == x) {
            return Err(fail(format!("variable `{x}` bound twice in the environment")));
        }
        let Some((_, a)) = scope.iter().rev().find(|(y, _)| y == x) else {
            return Err(fail(format!("variable `{x}` is not in scope")));
        };
        s.well_formed(a, waa)
            .map_err(|e| fail(format!("binding of `{x}`: {e}")))?;
    }
    j.set
        .well_formed(sub.ty(), waa)
        .map_err(|e| fail(format!("conclusion: {e}")))?;

    let arity = |n: usize| -> Result<(), Violation> {
        if d.premises.len() == n {
            Ok(())
        } else {
            Err(fail(format!("expected {n} premises, found {}", d.premises.len())))
        }
    };
    let same_subject = |p: &Derivation, path: &TermPath| -> Result<(), Violation> {
        if &p.judgment.path != path {
            return Err(fail(format!(
                "premise is about {} instead of {path}",
                p.judgment.path
            )));
        }
        if p.judgment.polarity != j.polarity {
            return Err(fail("premise has the wrong polarity".to_string()));
        }
        Ok(())
    };
    let same_env = |p: &Derivation| -> Result<(), Violation> {
        if p.judgment.env != j.env {
            return Err(fail("premise environment differs".to_string()));
        }
        Ok(())
    };
    let no_witness = || -> Result<(), Violation> {
        if d.witness != Witness::None {
            return Err(fail("unexpected witness".to_string()));
        }
        Ok(())
    };

    match d.rule {
        Rule::Axiom => {
            arity(0)?;
            no_witness()?;
            let TermKind::Var(x) = sub.kind() else {
                return Err(fail("subject is not a variable".to_string()));
            };
            match j.lookup(x) {
                Some(s) if s == &j.set => {}
                Some(_) => return Err(fail(format!("conclusion differs from the binding of `{x}`"))),
                None => return Err(fail(format!("`{x}` is not bound in the environment"))),
            }
        }
        Rule::Intersect => {
            no_witness()?;
            let mut union = ITypeSet::new();
            for p in &d.premises {
                same_subject(p, &j.path)?;
                same_env(p)?;
                union = union.union(&p.judgment.set);
            }
            if union != j.set {
                return Err(fail("conclusion is not the union of the premises".to_string()));
            }
        }
        Rule::Subsume => {
            arity(1)?;
            no_witness()?;
            let p = &d.premises[0];
            same_subject(p, &j.path)?;
            same_env(p)?;
            if !j.set.subsumed_by(&p.judgment.set) {
                return Err(fail("conclusion is not subsumed by the premise".to_string()));
            }
        }
        Rule::ConstNullary => {
            arity(0)?;
            no_witness()?;
            let TermKind::Const(c) = sub.kind() else {
                return Err(fail("subject is not a constant".to_string()));
            };
            if !sub.ty().is_base() {
                return Err(fail(format!("constant `{c}` is not nullary")));
            }
            let acc = waa.nullary_accepting(c);
            let expected = match j.polarity {
                Polarity::Pos => acc,
                Polarity::Neg => waa.all().minus(acc),
            };
            if j.set != ITypeSet::states(expected) {
                return Err(fail(format!(
                    "conclusion must be {}",
                    ITypeSet::states(expected).display(waa)
                )));
            }
        }
        Rule::ConstTrans => {
            arity(0)?;
            let TermKind::Const(c) = sub.kind() else {
                return Err(fail("subject is not a constant".to_string()));
            };
            let n = sub.ty().arity();
            if n == 0 {
                return Err(fail(format!("constant `{c}` is nullary")));
            }
            if j.set.len() != 1 {
                return Err(fail("conclusion must be a single type".to_string()));
            }
            let t = j.set.iter().next().unwrap();
            let (args, q) = first_order_parts(t, n)
                .ok_or_else(|| fail("conclusion must have state-set premises".to_string()))?;
            let alts = waa.transitions(q, c);
            match (j.polarity, &d.witness) {
                (Polarity::Pos, Witness::Tuple(tuple)) => {
                    if !alts.contains(tuple) {
                        return Err(fail(format!(
                            "tuple is not a transition of {} on `{c}`",
                            waa.name(q)
                        )));
                    }
                    if tuple != &args {
                        return Err(fail("premises differ from the tuple".to_string()));
                    }
                }
                (Polarity::Pos, _) => return Err(fail("missing transition tuple".to_string())),
                (Polarity::Neg, Witness::None) => {
                    if let Some(bad) = alts
                        .iter()
                        .find(|alt| alt.iter().zip(&args).all(|(s, t)| s.inter(*t).is_empty()))
                    {
                        let shown: Vec<String> = bad.iter().map(|s| waa.fmt_set(*s)).collect();
                        return Err(fail(format!(
                            "transition ({}) of {} misses every premise",
                            shown.join(","),
                            waa.name(q)
                        )));
                    }
                }
                (Polarity::Neg, _) => return Err(fail("unexpected witness".to_string())),
            }
        }
        Rule::App => {
            arity(2)?;
            no_witness()?;
            if !matches!(sub.kind(), TermKind::App(..)) {
                return Err(fail("subject is not an application".to_string()));
            }
            let (pf, pa) = (&d.premises[0], &d.premises[1]);
            same_subject(pf, &j.path.child(PathStep::Fun))?;
            same_subject(pa, &j.path.child(PathStep::Arg))?;
            same_env(pf)?;
            same_env(pa)?;
            if pf.judgment.set.apply(&pa.judgment.set) != j.set {
                return Err(fail("conclusion is not S(T)".to_string()));
            }
        }
        Rule::Abs => {
            arity(1)?;
            let TermKind::Abs(x, _, _) = sub.kind() else {
                return Err(fail("subject is not an abstraction".to_string()));
            };
            let Witness::Binder(u) = &d.witness else {
                return Err(fail("missing binder type".to_string()));
            };
            let p = &d.premises[0];
            same_subject(p, &j.path.child(PathStep::Body))?;
            if p.judgment.env != extend_env(&j.env, x, u.clone()) {
                return Err(fail(format!("premise environment must extend with `{x}`")));
            }
            let strata: Vec<usize> = p.judgment.set.iter().map(|t| t.stratum(waa)).collect();
            if let Some(&k) = strata.first() {
                if strata.iter().any(|&l| l != k) {
                    return Err(fail("premise types have different strata".to_string()));
                }
                if u.max_stratum(waa).is_some_and(|l| l > k) {
                    return Err(fail(format!("binder type exceeds stratum {k}")));
                }
            }
            if ITypeSet::arrows(u, &p.judgment.set) != j.set {
                return Err(fail("conclusion is not U → T".to_string()));
            }
        }
        Rule::YOdd | Rule::YEven => {
            arity(2)?;
            if !matches!(sub.kind(), TermKind::Fix(..)) {
                return Err(fail("subject is not a fixpoint".to_string()));
            }
            let (pl, py) = (&d.premises[0], &d.premises[1]);
            same_subject(pl, &j.path.child(PathStep::Lambda))?;
            same_subject(py, &j.path)?;
            same_env(pl)?;
            same_env(py)?;
            let split = matches!(
                (d.rule, j.polarity),
                (Rule::YEven, Polarity::Pos) | (Rule::YOdd, Polarity::Neg)
            );
            if !split {
                no_witness()?;
                if pl.judgment.set.apply(&py.judgment.set) != j.set {
                    return Err(fail("conclusion is not S(T)".to_string()));
                }
            } else {
                let Witness::Split { k, s, t } = &d.witness else {
                    return Err(fail("missing stratum split".to_string()));
                };
                let k = *k;
                let parity = if j.polarity == Polarity::Pos { 0 } else { 1 };
                if k % 2 != parity {
                    return Err(fail(format!("stratum {k} has the wrong parity")));
                }
                if s.iter().any(|x| x.stratum(waa) != k) {
                    return Err(fail(format!("S must lie in stratum {k}")));
                }
                if t.iter().any(|x| x.stratum(waa) >= k) {
                    return Err(fail(format!("T must lie below stratum {k}")));
                }
                if pl.judgment.set != ITypeSet::arrows(&s.union(t), s) {
                    return Err(fail("first premise must be (S ∪ T) → S".to_string()));
                }
                if &py.judgment.set != t {
                    return Err(fail("second premise must be T".to_string()));
                }
                if j.set != s.union(t) {
                    return Err(fail("conclusion must be S ∪ T".to_string()));
                }
            }
        }
    }

    for (i, p) in d.premises.iter().enumerate() {
        pos.push(i);
        check_node(p, term, waa, pos)?;
        pos.pop();
    }
    Ok(())
}

/// `S1 → ... → Sn → q` with state-set premises.
fn first_order_parts(t: &IType, n: usize) -> Option<(Vec<StateSet>, usize)> {
    let mut args = Vec::with_capacity(n);
    let mut cur = t;
    for _ in 0..n {
        let IType::Arrow(u, r) = cur else { return None };
        args.push(u.as_states()?);
        cur = r;
    }
    match cur {
        IType::State(q) => Some((args, *q)),
        IType::Arrow(..) => None,
    }
}
