//! The stratified model `D^0, ..., D^m` of an automaton.
//!
//! `D^k_o` is the powerset of the states of rank at most `k`; `D^k_{A→B}`
//! holds the monotone functions that refine some element of `D^{k-1}_{A→B}`.
//! Closed terms of base type evaluate at stratum `m` to the set of states
//! from which the automaton accepts their Böhm tree.
//!
//! Values stay lazy (closures, step functions, projections) until a
//! comparison forces them into tables over an enumerated domain lattice.

mod eval;
mod lattice;
mod value;

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use crate::automaton::{StateSet, Waa};
use crate::syntax::SimpleType;

pub use lattice::Lattice;
pub use value::{Env, Point, Value};

use value::{split_arrow, LazyKind};

/// Default bound on the number of elements of a single enumerated lattice.
pub const DEFAULT_CAP: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("lattice D^{k}_{{{ty}}} has more than {cap} elements (reached {size})")]
    LatticeTooLarge {
        k: usize,
        ty: SimpleType,
        size: usize,
        cap: usize,
    },
    #[error("stratum {k} is out of range 0..={max}")]
    Stratum { k: usize, max: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("expected a term of base type, found {0}")]
    NotBaseType(SimpleType),
}

/// Model of one automaton with per-session lattice caches.
pub struct Model {
    waa: Waa,
    cap: usize,
    lattices: RefCell<HashMap<(usize, SimpleType), Rc<Lattice>>>,
}

impl Model {
    pub fn new(waa: Waa) -> Model {
        Model::with_cap(waa, DEFAULT_CAP)
    }

    pub fn with_cap(waa: Waa, cap: usize) -> Model {
        Model {
            waa,
            cap,
            lattices: RefCell::new(HashMap::new()),
        }
    }

    pub fn waa(&self) -> &Waa {
        &self.waa
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn max_rank(&self) -> usize {
        self.waa.max_rank()
    }

    fn check_stratum(&self, k: usize) -> Result<(), ModelError> {
        if k > self.max_rank() {
            Err(ModelError::Stratum {
                k,
                max: self.max_rank(),
            })
        } else {
            Ok(())
        }
    }

    // ---- points -------------------------------------------------------

    pub(crate) fn down_point(&self, k: usize, ty: &SimpleType, p: &Point) -> Result<Point, ModelError> {
        match ty.as_arrow() {
            None => Ok(Point::Set(p.as_set().inter(self.waa.rank_le(k - 1)))),
            Some((a, b)) => {
                let ups = self.up_indices(k, a, false)?;
                let t = p.table();
                let mut out = Vec::with_capacity(ups.len());
                for &i in ups.iter() {
                    out.push(self.down_point(k, b, &t[i])?);
                }
                Ok(Point::Table(out.into()))
            }
        }
    }

    /// Lifts a point of `D^{k-1}_A` to `D^k_A`.
    pub(crate) fn up_point(
        &self,
        k: usize,
        ty: &SimpleType,
        p: &Point,
        sup: bool,
    ) -> Result<Point, ModelError> {
        match ty.as_arrow() {
            None => {
                let s = p.as_set();
                Ok(Point::Set(if sup { s.union(self.waa.rank_eq(k)) } else { s }))
            }
            Some((a, b)) => {
                let downs = self.down_indices(k, a)?;
                let t = p.table();
                let mut out = Vec::with_capacity(downs.len());
                for &i in downs.iter() {
                    out.push(self.up_point(k, b, &t[i], sup)?);
                }
                Ok(Point::Table(out.into()))
            }
        }
    }

    pub fn top_point(&self, k: usize, ty: &SimpleType) -> Result<Point, ModelError> {
        self.materialize(k, ty, &self.top(k, ty))
    }

    pub fn bottom_point(&self, k: usize, ty: &SimpleType) -> Result<Point, ModelError> {
        self.materialize(k, ty, &self.bottom(k, ty))
    }

    // ---- values -------------------------------------------------------

    /// `⊤^k_A`.
    pub fn top(&self, k: usize, ty: &SimpleType) -> Value {
        match ty.as_arrow() {
            None => Value::set(self.waa.rank_le(k)),
            Some((_, b)) => Value::lazy(LazyKind::Constant(self.top(k, b))),
        }
    }

    /// `⊥^k_A`.
    #[allow(clippy::only_used_in_recursion)]
    pub fn bottom(&self, k: usize, ty: &SimpleType) -> Value {
        match ty.as_arrow() {
            None => Value::set(StateSet::EMPTY),
            Some((_, b)) => Value::lazy(LazyKind::Constant(self.bottom(k, b))),
        }
    }

    /// Tabulates `v` as an element of `D^k_A`.
    pub fn materialize(&self, k: usize, ty: &SimpleType, v: &Value) -> Result<Point, ModelError> {
        let lazy = match v {
            Value::Point(p) => return Ok(p.clone()),
            Value::Lazy(l) => l,
        };
        if let Some(p) = lazy.cache.get() {
            return Ok(p.clone());
        }
        let (a, b) = split_arrow(ty);
        let dom = self.lattice(k, a)?;
        let mut out = Vec::with_capacity(dom.len());
        for e in dom.elems() {
            let r = self.apply(k, ty, v, &Value::Point(e.clone()))?;
            out.push(self.materialize(k, b, &r)?);
        }
        let p = Point::Table(out.into());
        let _ = lazy.cache.set(p.clone());
        Ok(p)
    }

    /// `f(arg)` for `f` in `D^k_{A→B}`.
    pub fn apply(&self, k: usize, fty: &SimpleType, f: &Value, arg: &Value) -> Result<Value, ModelError> {
        let (a, b) = split_arrow(fty);
        let lazy = match f {
            Value::Point(p) => {
                let dom = self.lattice(k, a)?;
                let e = self.materialize(k, a, arg)?;
                let i = dom
                    .index_of(&e)
                    .expect("argument is an element of the domain lattice");
                return Ok(Value::Point(p.table()[i].clone()));
            }
            Value::Lazy(l) => l,
        };
        if let Some(p) = lazy.cache.get() {
            return self.apply(k, fty, &Value::Point(p.clone()), arg);
        }
        match &lazy.kind {
            LazyKind::Closure { param, body, env } => self.eval(body, &env.bind(param, arg.clone()), k),
            LazyKind::Const { name, arity, args } => {
                let mut args = args.clone();
                args.push(arg.as_set());
                if args.len() == *arity {
                    Ok(Value::set(self.waa.step_states(name, &args, self.waa.rank_le(k))))
                } else {
                    Ok(Value::lazy(LazyKind::Const {
                        name: name.clone(),
                        arity: *arity,
                        args,
                    }))
                }
            }
            LazyKind::Constant(v) => Ok(v.clone()),
            LazyKind::Step { premise, result, co } => {
                let holds = if *co {
                    self.leq(k, a, arg, premise)?
                } else {
                    self.leq(k, a, premise, arg)?
                };
                Ok(match (holds, co) {
                    (true, _) => result.clone(),
                    (false, false) => self.bottom(k, b),
                    (false, true) => self.top(k, b),
                })
            }
            LazyKind::Join(vs) => {
                let rs = vs
                    .iter()
                    .map(|v| self.apply(k, fty, v, arg))
                    .collect::<Result<Vec<_>, _>>()?;
                self.join(k, b, &rs)
            }
            LazyKind::Meet(vs) => {
                let rs = vs
                    .iter()
                    .map(|v| self.apply(k, fty, v, arg))
                    .collect::<Result<Vec<_>, _>>()?;
                self.meet(k, b, &rs)
            }
            LazyKind::Down(v) => {
                let up = self.lift_inf(k + 1, a, arg)?;
                let r = self.apply(k + 1, fty, v, &up)?;
                self.down(k + 1, b, &r)
            }
            LazyKind::UpInf(v) | LazyKind::UpSup(v) => {
                let sup = matches!(lazy.kind, LazyKind::UpSup(_));
                let d = self.down(k, a, arg)?;
                let r = self.apply(k - 1, fty, v, &d)?;
                self.lift(k, b, &r, sup)
            }
            LazyKind::Bar(v) => {
                let r = self.apply(k, fty, v, arg)?;
                self.bar(k, b, &r)
            }
        }
    }

    /// `d ≤ e` in `D^k_A`.
    pub fn leq(&self, k: usize, ty: &SimpleType, d: &Value, e: &Value) -> Result<bool, ModelError> {
        Ok(self.materialize(k, ty, d)?.leq(&self.materialize(k, ty, e)?))
    }

    pub fn equal(&self, k: usize, ty: &SimpleType, d: &Value, e: &Value) -> Result<bool, ModelError> {
        Ok(self.materialize(k, ty, d)? == self.materialize(k, ty, e)?)
    }

    pub fn join(&self, k: usize, ty: &SimpleType, vs: &[Value]) -> Result<Value, ModelError> {
        self.combine(k, ty, vs, false)
    }

    pub fn meet(&self, k: usize, ty: &SimpleType, vs: &[Value]) -> Result<Value, ModelError> {
        self.combine(k, ty, vs, true)
    }

    fn combine(&self, k: usize, ty: &SimpleType, vs: &[Value], meet: bool) -> Result<Value, ModelError> {
        if vs.is_empty() {
            return Ok(if meet { self.top(k, ty) } else { self.bottom(k, ty) });
        }
        if vs.len() == 1 {
            return Ok(vs[0].clone());
        }
        if ty.is_base() {
            let sets = vs.iter().map(Value::as_set);
            let s = if meet {
                sets.fold(self.waa.rank_le(k), StateSet::inter)
            } else {
                sets.fold(StateSet::EMPTY, StateSet::union)
            };
            return Ok(Value::set(s));
        }
        let points: Option<Vec<&Point>> = vs.iter().map(Value::as_point).collect();
        if let Some(ps) = points {
            let first = ps[0].clone();
            let p = ps[1..]
                .iter()
                .fold(first, |acc, p| if meet { acc.meet(p) } else { acc.join(p) });
            return Ok(Value::Point(p));
        }
        Ok(Value::lazy(if meet {
            LazyKind::Meet(vs.to_vec())
        } else {
            LazyKind::Join(vs.to_vec())
        }))
    }

    /// `d↓` for `d` in `D^k_A`, `k ≥ 1`.
    pub fn down(&self, k: usize, ty: &SimpleType, d: &Value) -> Result<Value, ModelError> {
        if k == 0 {
            return Err(ModelError::Stratum {
                k: 0,
                max: self.max_rank(),
            });
        }
        self.check_stratum(k)?;
        match d {
            Value::Point(p) => Ok(Value::Point(self.down_point(k, ty, p)?)),
            Value::Lazy(l) => match l.cache.get() {
                Some(p) => Ok(Value::Point(self.down_point(k, ty, p)?)),
                None => Ok(Value::lazy(LazyKind::Down(d.clone()))),
            },
        }
    }

    /// `d↑inf` in `D^k_A` for `d` in `D^{k-1}_A`.
    pub fn lift_inf(&self, k: usize, ty: &SimpleType, d: &Value) -> Result<Value, ModelError> {
        self.lift(k, ty, d, false)
    }

    /// `d↑sup` in `D^k_A` for `d` in `D^{k-1}_A`.
    pub fn lift_sup(&self, k: usize, ty: &SimpleType, d: &Value) -> Result<Value, ModelError> {
        self.lift(k, ty, d, true)
    }

    fn lift(&self, k: usize, ty: &SimpleType, d: &Value, sup: bool) -> Result<Value, ModelError> {
        if k == 0 {
            return Err(ModelError::Stratum {
                k: 0,
                max: self.max_rank(),
            });
        }
        self.check_stratum(k)?;
        match d.as_point() {
            Some(p) => Ok(Value::Point(self.up_point(k, ty, p, sup)?)),
            None => Ok(Value::lazy(if sup {
                LazyKind::UpSup(d.clone())
            } else {
                LazyKind::UpInf(d.clone())
            })),
        }
    }

    /// `d̄`: the part of `d` made of states of rank exactly `k`.
    pub fn bar(&self, k: usize, ty: &SimpleType, d: &Value) -> Result<Value, ModelError> {
        self.check_stratum(k)?;
        let mask = self.waa.rank_eq(k);
        match d.as_point() {
            Some(p) => Ok(Value::Point(p.restrict(mask))),
            None if ty.is_base() => unreachable!("base values are points"),
            None => Ok(Value::lazy(LazyKind::Bar(d.clone()))),
        }
    }

    /// `(d, e)` with `d↓` and `d̄`, so that `d = (d↓)↑inf ∨ d̄`.
    pub fn decompose(&self, k: usize, ty: &SimpleType, d: &Value) -> Result<(Value, Value), ModelError> {
        Ok((self.down(k, ty, d)?, self.bar(k, ty, d)?))
    }

    /// `d ⇒ e`: `e` above `d`, `⊥` elsewhere.
    pub fn step(&self, d: Value, e: Value) -> Value {
        Value::lazy(LazyKind::Step {
            premise: d,
            result: e,
            co: false,
        })
    }

    /// `d ⇘ e`: `e` below `d`, `⊤` elsewhere.
    pub fn costep(&self, d: Value, e: Value) -> Value {
        Value::lazy(LazyKind::Step {
            premise: d,
            result: e,
            co: true,
        })
    }

    /// Canonical text form of a point: sets as sorted state lists, tables as
    /// `argument ↦ result` listings.
    pub fn render(&self, k: usize, ty: &SimpleType, p: &Point) -> Result<String, ModelError> {
        match ty.as_arrow() {
            None => Ok(format!("{{{}}}", self.waa.sorted_names(p.as_set()).join(","))),
            Some((a, b)) => {
                let dom = self.lattice(k, a)?;
                let mut parts = Vec::new();
                for (e, r) in dom.elems().iter().zip(p.table()) {
                    parts.push(format!("{} ↦ {}", self.render(k, a, e)?, self.render(k, b, r)?));
                }
                Ok(format!("[{}]", parts.join(", ")))
            }
        }
    }
}
