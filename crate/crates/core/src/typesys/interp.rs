use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use super::types::{IType, ITypeSet};
use crate::model::{Model, ModelError, Point, Value};
use crate::syntax::SimpleType;

/// Type semantics over one model, with a cache of representations.
pub struct TypeModel<'m> {
    model: &'m Model,
    reps: RefCell<HashMap<(usize, SimpleType, Point), ITypeSet>>,
}

impl<'m> TypeModel<'m> {
    pub fn new(model: &'m Model) -> Self {
        TypeModel {
            model,
            reps: RefCell::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    /// `⟦t⟧^k`: `{q}` for a state of rank at most `k`, `⊥` above, step
    /// functions for arrows.
    pub fn interp_type(&self, t: &IType, k: usize, ty: &SimpleType) -> Value {
        match t {
            IType::State(q) => {
                let waa = self.model.waa();
                if waa.rank(*q) <= k {
                    Value::set(crate::automaton::StateSet::singleton(*q))
                } else {
                    Value::set(crate::automaton::StateSet::EMPTY)
                }
            }
            IType::Arrow(u, t) => {
                let (a, b) = ty.as_arrow().expect("arrow type over a functional type");
                self.model.step(self.interp(u, k, a), self.interp_type(t, k, b))
            }
        }
    }

    /// `⟦S⟧^k`, the join of the interpretations of the elements.
    pub fn interp(&self, s: &ITypeSet, k: usize, ty: &SimpleType) -> Value {
        let vs: Vec<Value> = s.iter().map(|t| self.interp_type(t, k, ty)).collect();
        self.model
            .join(k, ty, &vs)
            .expect("stratum checked by the caller")
    }

    /// `⦇t⦈^k`: `Q≤k − {q}` for a state, co-step functions for arrows.
    pub fn dual_interp_type(&self, t: &IType, k: usize, ty: &SimpleType) -> Value {
        match t {
            IType::State(q) => {
                let waa = self.model.waa();
                let mut s = waa.rank_le(k);
                s.remove(*q);
                Value::set(s)
            }
            IType::Arrow(u, t) => {
                let (a, b) = ty.as_arrow().expect("arrow type over a functional type");
                self.model
                    .costep(self.dual_interp(u, k, a), self.dual_interp_type(t, k, b))
            }
        }
    }

    /// `⦇S⦈^k`, the meet of the dual interpretations of the elements.
    pub fn dual_interp(&self, s: &ITypeSet, k: usize, ty: &SimpleType) -> Value {
        let vs: Vec<Value> = s.iter().map(|t| self.dual_interp_type(t, k, ty)).collect();
        self.model
            .meet(k, ty, &vs)
            .expect("stratum checked by the caller")
    }

    /// `⟦t⟧^k ≤ v`, decided without enumerating the lattice of `ty`.
    pub fn dominates(&self, v: &Value, t: &IType, k: usize, ty: &SimpleType) -> Result<bool, ModelError> {
        let waa = self.model.waa();
        if t.stratum(waa) > k {
            return Ok(true);
        }
        match t {
            IType::State(q) => Ok(v.as_set().contains(*q)),
            IType::Arrow(u, r) => {
                let (a, b) = ty.as_arrow().expect("arrow type over a functional type");
                let w = self.model.apply(k, ty, v, &self.interp(u, k, a))?;
                self.dominates(&w, r, k, b)
            }
        }
    }

    pub fn dominates_set(
        &self,
        v: &Value,
        s: &ITypeSet,
        k: usize,
        ty: &SimpleType,
    ) -> Result<bool, ModelError> {
        for t in s.iter() {
            if !self.dominates(v, t, k, ty)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `v ≤ ⦇t⦈^k`.
    pub fn dual_dominated(
        &self,
        v: &Value,
        t: &IType,
        k: usize,
        ty: &SimpleType,
    ) -> Result<bool, ModelError> {
        match t {
            IType::State(q) => Ok(!v.as_set().contains(*q)),
            IType::Arrow(u, r) => {
                let (a, b) = ty.as_arrow().expect("arrow type over a functional type");
                let w = self.model.apply(k, ty, v, &self.dual_interp(u, k, a))?;
                self.dual_dominated(&w, r, k, b)
            }
        }
    }

    pub fn dual_dominated_set(
        &self,
        v: &Value,
        s: &ITypeSet,
        k: usize,
        ty: &SimpleType,
    ) -> Result<bool, ModelError> {
        for t in s.iter() {
            if !self.dual_dominated(v, t, k, ty)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A set of types of stratum at most `k` whose interpretation is `v`.
    pub fn represent(&self, v: &Value, k: usize, ty: &SimpleType) -> Result<ITypeSet, ModelError> {
        let p = self.model.materialize(k, ty, v)?;
        self.represent_point(&p, k, ty)
    }

    fn represent_point(&self, p: &Point, k: usize, ty: &SimpleType) -> Result<ITypeSet, ModelError> {
        let key = (k, ty.clone(), p.clone());
        if let Some(s) = self.reps.borrow().get(&key) {
            return Ok(s.clone());
        }
        let mut out = if k > 0 {
            let lower = self.model.down(k, ty, &Value::Point(p.clone()))?;
            self.represent(&lower, k - 1, ty)?
        } else {
            ITypeSet::new()
        };
        let bar = p.restrict(self.model.waa().rank_eq(k));
        out = out.union(&self.represent_bar(&bar, k, ty)?);
        self.reps.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    /// Types of stratum exactly `k` for a point made of rank-`k` states.
    /// Each target keeps only its minimal arguments.
    pub fn represent_bar(&self, p: &Point, k: usize, ty: &SimpleType) -> Result<ITypeSet, ModelError> {
        let Some((a, b)) = ty.as_arrow() else {
            return Ok(ITypeSet::states(p.as_set().inter(self.model.waa().rank_eq(k))));
        };
        let dom = self.model.lattice(k, a)?;
        let mut by_target: BTreeMap<IType, Vec<usize>> = BTreeMap::new();
        for (i, r) in p.table().iter().enumerate() {
            for t in self.represent_bar(r, k, b)?.iter() {
                by_target.entry(t.clone()).or_default().push(i);
            }
        }
        let mut out = ITypeSet::new();
        for (t, args) in by_target {
            for &i in &args {
                let e = &dom.elems()[i];
                let minimal = !args.iter().any(|&j| j != i && dom.elems()[j].leq(e));
                if minimal {
                    let u = self.represent_point(e, k, a)?;
                    out.insert(IType::arrow(u, t.clone()));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{parse_waa, StateSet};
    use crate::syntax::{parse_type, Signature};
    use crate::typesys::parse_itype_set;

    fn a2() -> Model {
        Model::new(
            parse_waa(
                "states: q1@1 q2@2\nq1 a -> ({q1})\nq2 a -> ({q1,q2})\nq1 b -> ({})\nq2 b -> ({q2})\n",
                &Signature::new().with("a", 1).with("b", 1),
            )
            .unwrap(),
        )
    }

    #[test]
    fn constant_a_is_represented_by_its_transitions() {
        let m = a2();
        let tm = TypeModel::new(&m);
        let oo = parse_type("o -> o").unwrap();
        let a = m.const_sem("a", 2).unwrap();
        let rep = tm.represent(&a, 2, &oo).unwrap();
        assert_eq!(rep, parse_itype_set("{{q1}->q1,{q1,q2}->q2}", m.waa()).unwrap());
        assert!(m.equal(2, &oo, &tm.interp(&rep, 2, &oo), &a).unwrap());
    }

    #[test]
    fn round_trip_on_small_lattices() {
        let m = a2();
        let tm = TypeModel::new(&m);
        for ty in ["o", "o -> o", "(o -> o) -> o"] {
            let ty = parse_type(ty).unwrap();
            for k in 0..=2 {
                for p in m.lattice(k, &ty).unwrap().elems() {
                    let v = Value::Point(p.clone());
                    let rep = tm.represent(&v, k, &ty).unwrap();
                    assert!(rep.max_stratum(m.waa()).unwrap_or(0) <= k);
                    let back = m.materialize(k, &ty, &tm.interp(&rep, k, &ty)).unwrap();
                    assert_eq!(&back, p);
                }
            }
        }
    }

    #[test]
    fn dominance_matches_interpretation() {
        let m = a2();
        let tm = TypeModel::new(&m);
        let oo = parse_type("o -> o").unwrap();
        let a = m.const_sem("a", 2).unwrap();
        let yes = parse_itype_set("{{q1,q2}->q2}", m.waa()).unwrap();
        let no = parse_itype_set("{{q2}->q2}", m.waa()).unwrap();
        assert!(tm.dominates_set(&a, &yes, 2, &oo).unwrap());
        assert!(!tm.dominates_set(&a, &no, 2, &oo).unwrap());
        let d = tm.dual_interp(&no, 2, &oo);
        assert!(tm.dual_dominated_set(&d, &no, 2, &oo).unwrap());
        let q = tm.dual_interp(&parse_itype_set("{q1}", m.waa()).unwrap(), 2, &SimpleType::Base);
        assert_eq!(q.as_set(), StateSet(0b10));
    }
}
