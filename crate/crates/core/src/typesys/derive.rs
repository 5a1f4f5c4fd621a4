use thiserror::Error;

use super::deriv::{Derivation, Judgment, Polarity, Rule, Witness};
use super::interp::TypeModel;
use super::types::{IType, ITypeSet};
use crate::automaton::{dualize, StateSet, Waa, WaaError, DEFAULT_DUAL_BOUND};
use crate::model::{Env, Model, ModelError, Value};
use crate::syntax::{PathStep, SimpleType, Term, TermKind, TermPath};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("{set} is not a type of the subterm at {path}")]
    NotDerivable { path: TermPath, set: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Automaton(#[from] WaaError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Bound on the number of odd-stratum unfoldings of one fixpoint.
const MAX_UNFOLD: usize = 10_000;

type TypedEnv = Vec<(String, SimpleType, ITypeSet)>;

struct Deriver<'a, 'm> {
    tm: &'a TypeModel<'m>,
    waa: &'m Waa,
}

/// Builds `⊢ term ≥ target` for a closed term, guided by the model.
pub fn derive(model: &Model, term: &Term, target: &ITypeSet) -> Result<Derivation, DeriveError> {
    let tm = TypeModel::new(model);
    let d = Deriver {
        tm: &tm,
        waa: model.waa(),
    };
    d.derive(&Vec::new(), &TermPath::root(), term, target)
}

/// Builds `⊢ term ≱ target` for a closed term. `dual` must be the model of
/// the dual automaton.
pub fn derive_dual(dual: &Model, term: &Term, target: &ITypeSet) -> Result<Derivation, DeriveError> {
    let d = derive(dual, term, target)?;
    Ok(to_dual(d))
}

/// Model of the dual automaton, sharing the lattice cap of `model`.
pub fn dual_model(model: &Model) -> Result<Model, DeriveError> {
    Ok(Model::with_cap(
        dualize(model.waa(), DEFAULT_DUAL_BOUND)?,
        model.cap(),
    ))
}

/// Reads a positive derivation over the dual automaton as a dual
/// derivation over the original one.
fn to_dual(d: Derivation) -> Derivation {
    let (rule, witness) = match (d.rule, d.witness) {
        (Rule::YEven, Witness::Split { k, s, t }) => (Rule::YOdd, Witness::Split { k: k - 1, s, t }),
        (Rule::YOdd, w) => (Rule::YEven, w),
        (Rule::ConstTrans, _) => (Rule::ConstTrans, Witness::None),
        (r, w) => (r, w),
    };
    Derivation {
        rule,
        judgment: Judgment {
            polarity: Polarity::Neg,
            ..d.judgment
        },
        witness,
        premises: d.premises.into_iter().map(to_dual).collect(),
    }
}

/// Outcome for one state: a derivation of `≥ {q}` if the automaton accepts
/// from `q`, of `≱ {q}` otherwise.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub state: usize,
    pub accepted: bool,
    pub derivation: Derivation,
}

/// Certificates for every state in `states`, decided by the model.
pub fn decide(
    model: &Model,
    dual: &Model,
    term: &Term,
    states: StateSet,
) -> Result<Vec<Certificate>, DeriveError> {
    let acc = model.accept_by_model(term)?;
    let mut out = Vec::new();
    for q in states.iter() {
        let target = ITypeSet::singleton(IType::State(q));
        let accepted = acc.contains(q);
        let derivation = if accepted {
            derive(model, term, &target)?
        } else {
            derive_dual(dual, term, &target)?
        };
        out.push(Certificate {
            state: q,
            accepted,
            derivation,
        });
    }
    Ok(out)
}

fn plain_env(env: &TypedEnv) -> Vec<(String, ITypeSet)> {
    env.iter().map(|(x, _, s)| (x.clone(), s.clone())).collect()
}

fn node(
    rule: Rule,
    env: &TypedEnv,
    path: &TermPath,
    set: ITypeSet,
    witness: Witness,
    premises: Vec<Derivation>,
) -> Derivation {
    Derivation {
        rule,
        judgment: Judgment {
            env: plain_env(env),
            path: path.clone(),
            polarity: Polarity::Pos,
            set,
        },
        witness,
        premises,
    }
}

impl Deriver<'_, '_> {
    fn sem_env(&self, env: &TypedEnv, k: usize) -> Env {
        env.iter()
            .fold(Env::new(), |e, (x, ty, s)| e.bind(x, self.tm.interp(s, k, ty)))
    }

    fn eval(&self, env: &TypedEnv, t: &Term, k: usize) -> Result<Value, DeriveError> {
        Ok(self.tm.model().eval(t, &self.sem_env(env, k), k)?)
    }

    fn subsume(&self, d: Derivation, target: &ITypeSet) -> Result<Derivation, DeriveError> {
        if &d.judgment.set == target {
            return Ok(d);
        }
        if !target.subsumed_by(&d.judgment.set) {
            return Err(DeriveError::Internal(format!(
                "{} does not subsume {} at {}",
                d.judgment.set.display(self.waa),
                target.display(self.waa),
                d.judgment.path
            )));
        }
        let j = &d.judgment;
        Ok(Derivation {
            rule: Rule::Subsume,
            judgment: Judgment {
                set: target.clone(),
                ..j.clone()
            },
            witness: Witness::None,
            premises: vec![d],
        })
    }

    fn derive(
        &self,
        env: &TypedEnv,
        path: &TermPath,
        t: &Term,
        target: &ITypeSet,
    ) -> Result<Derivation, DeriveError> {
        for s in target.iter() {
            let k = s.stratum(self.waa);
            let v = self.eval(env, t, k)?;
            if !self.tm.dominates(&v, s, k, t.ty())? {
                return Err(DeriveError::NotDerivable {
                    path: path.clone(),
                    set: ITypeSet::singleton(s.clone()).display(self.waa).to_string(),
                });
            }
        }
        if target.len() == 1 {
            return self.derive_one(env, path, t, target.iter().next().unwrap());
        }
        let premises = target
            .iter()
            .map(|s| self.derive_one(env, path, t, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(node(
            Rule::Intersect,
            env,
            path,
            target.clone(),
            Witness::None,
            premises,
        ))
    }

    fn derive_one(
        &self,
        env: &TypedEnv,
        path: &TermPath,
        t: &Term,
        s: &IType,
    ) -> Result<Derivation, DeriveError> {
        let k = s.stratum(self.waa);
        let single = ITypeSet::singleton(s.clone());
        match t.kind() {
            TermKind::Var(x) => {
                let (_, _, bound) =
                    env.iter().rev().find(|(y, _, _)| y == x).ok_or_else(|| {
                        DeriveError::Internal(format!("`{x}` missing from the environment"))
                    })?;
                let ax = node(Rule::Axiom, env, path, bound.clone(), Witness::None, vec![]);
                self.subsume(ax, &single)
            }
            TermKind::Const(c) if t.ty().is_base() => {
                let acc = ITypeSet::states(self.waa.nullary_accepting(c));
                let d = node(Rule::ConstNullary, env, path, acc, Witness::None, vec![]);
                self.subsume(d, &single)
            }
            TermKind::Const(c) => {
                let n = t.ty().arity();
                let mut premises = Vec::with_capacity(n);
                let mut cur = s;
                for _ in 0..n {
                    let IType::Arrow(u, r) = cur else {
                        return Err(DeriveError::Internal("ill-shaped constant type".into()));
                    };
                    premises.push(u.as_states().unwrap_or(StateSet::EMPTY));
                    cur = r;
                }
                let q = cur.target_state();
                let tuple = self
                    .waa
                    .transitions(q, c)
                    .iter()
                    .find(|alt| alt.iter().zip(&premises).all(|(a, p)| a.is_subset(*p)))
                    .ok_or_else(|| DeriveError::Internal(format!("no transition of `{c}` fits")))?
                    .clone();
                let ty = tuple
                    .iter()
                    .rev()
                    .fold(IType::State(q), |acc, a| IType::arrow(ITypeSet::states(*a), acc));
                let d = node(
                    Rule::ConstTrans,
                    env,
                    path,
                    ITypeSet::singleton(ty),
                    Witness::Tuple(tuple),
                    vec![],
                );
                self.subsume(d, &single)
            }
            TermKind::App(m, n) => {
                let arg = self.eval(env, n, k)?;
                let tset = self.tm.represent(&arg, k, n.ty())?;
                let dn = self.derive(env, &path.child(PathStep::Arg), n, &tset)?;
                let fset = ITypeSet::singleton(IType::arrow(tset, s.clone()));
                let dm = self.derive(env, &path.child(PathStep::Fun), m, &fset)?;
                Ok(node(Rule::App, env, path, single, Witness::None, vec![dm, dn]))
            }
            TermKind::Abs(x, a, body) => {
                let IType::Arrow(u, r) = s else {
                    return Err(DeriveError::Internal("state type for an abstraction".into()));
                };
                let mut inner = env.clone();
                inner.retain(|(y, _, _)| y != x);
                inner.push((x.clone(), a.clone(), u.clone()));
                let db = self.derive(
                    &inner,
                    &path.child(PathStep::Body),
                    body,
                    &ITypeSet::singleton((**r).clone()),
                )?;
                Ok(node(
                    Rule::Abs,
                    env,
                    path,
                    single,
                    Witness::Binder(u.clone()),
                    vec![db],
                ))
            }
            TermKind::Fix(..) if k.is_multiple_of(2) => self.fix_even(env, path, t, s, k),
            TermKind::Fix(..) => self.fix_odd(env, path, t, s, k),
        }
    }

    /// `S_k` from the rank-`k` part of the fixpoint, `T` from its projection.
    fn fix_even(
        &self,
        env: &TypedEnv,
        path: &TermPath,
        t: &Term,
        s: &IType,
        k: usize,
    ) -> Result<Derivation, DeriveError> {
        let model = self.tm.model();
        let ty = t.ty();
        let v = self.eval(env, t, k)?;
        let p = model.materialize(k, ty, &v)?;
        let sk = self.tm.represent_bar(&p.restrict(self.waa.rank_eq(k)), k, ty)?;
        let lower = if k > 0 {
            self.tm.represent(&model.down(k, ty, &v)?, k - 1, ty)?
        } else {
            ITypeSet::new()
        };
        let lam = t.fix_lambda().expect("fixpoint term");
        let all = sk.union(&lower);
        let dl = self.derive(
            env,
            &path.child(PathStep::Lambda),
            &lam,
            &ITypeSet::arrows(&all, &sk),
        )?;
        let dy = self.derive(env, path, t, &lower)?;
        let d = node(
            Rule::YEven,
            env,
            path,
            all,
            Witness::Split { k, s: sk, t: lower },
            vec![dl, dy],
        );
        self.subsume(d, &ITypeSet::singleton(s.clone()))
    }

    /// Unfolds `U(U(...U(T)))` from the projection `T` until `s` is reached.
    fn fix_odd(
        &self,
        env: &TypedEnv,
        path: &TermPath,
        t: &Term,
        s: &IType,
        k: usize,
    ) -> Result<Derivation, DeriveError> {
        let model = self.tm.model();
        let ty = t.ty();
        let v = self.eval(env, t, k)?;
        let lower = self.tm.represent(&model.down(k, ty, &v)?, k - 1, ty)?;
        let lam = t.fix_lambda().expect("fixpoint term");
        let lv = self.eval(env, &lam, k)?;
        let u = self.tm.represent(&lv, k, lam.ty())?;
        let du = self.derive(env, &path.child(PathStep::Lambda), &lam, &u)?;
        let mut d = self.derive(env, path, t, &lower)?;
        let target = ITypeSet::singleton(s.clone());
        for _ in 0..MAX_UNFOLD {
            if target.subsumed_by(&d.judgment.set) {
                return self.subsume(d, &target);
            }
            let next = u.apply(&d.judgment.set);
            if next == d.judgment.set {
                break;
            }
            d = node(Rule::YOdd, env, path, next, Witness::None, vec![du.clone(), d]);
        }
        Err(DeriveError::Internal(format!(
            "unfolding at {path} stopped before reaching {}",
            target.display(self.waa)
        )))
    }
}
