use super::value::{Env, LazyKind, Point, Value};
use super::{Model, ModelError};
use crate::automaton::StateSet;
use crate::syntax::{SimpleType, Term, TermKind};

impl Model {
    /// Interpretation of constant `name` in `D^k`.
    pub fn const_sem(&self, name: &str, k: usize) -> Result<Value, ModelError> {
        self.check_stratum(k)?;
        let arity = self
            .waa
            .sig()
            .arity(name)
            .ok_or_else(|| ModelError::UnknownConstant(name.to_string()))?;
        if arity == 0 {
            Ok(Value::set(
                self.waa.nullary_accepting(name).inter(self.waa.rank_le(k)),
            ))
        } else {
            Ok(Value::lazy(LazyKind::Const {
                name: name.to_string(),
                arity,
                args: Vec::new(),
            }))
        }
    }

    /// `⟦t⟧^k` in environment `env`.
    pub fn eval(&self, t: &Term, env: &Env, k: usize) -> Result<Value, ModelError> {
        self.check_stratum(k)?;
        match t.kind() {
            TermKind::Var(x) => env
                .lookup(x)
                .cloned()
                .ok_or_else(|| ModelError::UnboundVariable(x.clone())),
            TermKind::Const(c) => self.const_sem(c, k),
            TermKind::App(m, n) => {
                let f = self.eval(m, env, k)?;
                let a = self.eval(n, env, k)?;
                self.apply(k, m.ty(), &f, &a)
            }
            TermKind::Abs(x, _, body) => Ok(Value::lazy(LazyKind::Closure {
                param: x.clone(),
                body: body.clone(),
                env: env.clone(),
            })),
            TermKind::Fix(x, a, body) => {
                let f = Value::lazy(LazyKind::Closure {
                    param: x.clone(),
                    body: body.clone(),
                    env: env.clone(),
                });
                Ok(Value::Point(self.fixpoint(k, a, &f)?))
            }
        }
    }

    /// `fix^k_A(f)`: greatest fixpoint from `⊤` at stratum 0; at stratum
    /// `k > 0` the iteration starts from the lifted fixpoint of `f↓`, going
    /// down on even strata (from `↑sup`) and up on odd ones (from `↑inf`).
    pub fn fixpoint(&self, k: usize, ty: &SimpleType, f: &Value) -> Result<Point, ModelError> {
        self.check_stratum(k)?;
        let fty = SimpleType::arrow(ty.clone(), ty.clone());
        let mut x = if k == 0 {
            self.top_point(0, ty)?
        } else {
            let fd = self.down(k, &fty, f)?;
            let lower = self.fixpoint(k - 1, ty, &fd)?;
            self.up_point(k, ty, &lower, k.is_multiple_of(2))?
        };
        loop {
            let y = self.apply(k, &fty, f, &Value::Point(x.clone()))?;
            let y = self.materialize(k, ty, &y)?;
            if y == x {
                return Ok(x);
            }
            x = y;
        }
    }

    /// `⟦t⟧^m` for a closed term of base type: the states from which the
    /// automaton accepts the Böhm tree of `t`.
    pub fn accept_by_model(&self, t: &Term) -> Result<StateSet, ModelError> {
        if !t.ty().is_base() {
            return Err(ModelError::NotBaseType(t.ty().clone()));
        }
        Ok(self.eval(t, &Env::new(), self.max_rank())?.as_set())
    }
}
