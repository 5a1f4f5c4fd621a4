//! Randomized agreement between intersection types and the model.

use lamy::model::{Model, Point, Value};
use lamy::syntax::{parse_type, SimpleType};
use lamy::typesys::{IType, TypeModel};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::rngs::StdRng;
use rand::SeedableRng;

use super::fuzz::gen_set;

fn a2() -> Model {
    Model::new(super::a2(&super::abc()))
}

fn ty(s: &str) -> SimpleType {
    parse_type(s).unwrap()
}

fn point(m: &Model, k: usize, ty: &SimpleType, v: &Value) -> Point {
    m.materialize(k, ty, v).unwrap()
}

const TYPES: [&str; 3] = ["o", "o -> o", "(o -> o) -> o"];

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> u32 {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    if let Err(e) = runner.run(&strategy, test) {
        panic!("{e}");
    }
    cases
}

/// `(seed, type index, stratum, n, m)`
fn inputs(types: std::ops::Range<usize>) -> impl Strategy<Value = (u64, usize, usize, usize, usize)> {
    (any::<u64>(), types, 0usize..3, 0usize..5, 0usize..4)
}

pub fn subsumption_is_semantic_order(cases: u32) -> u32 {
    let m = a2();
    let tm = TypeModel::new(&m);
    run(cases, inputs(0..3), |(seed, ti, k, n, n2)| {
        let t = ty(TYPES[ti]);
        let mut rng = StdRng::seed_from_u64(seed);
        let s1 = gen_set(&mut rng, m.waa(), &t, k, n);
        let s2 = gen_set(&mut rng, m.waa(), &t, k, n2);
        let p1 = point(&m, k, &t, &tm.interp(&s1, k, &t));
        let p2 = point(&m, k, &t, &tm.interp(&s2, k, &t));
        prop_assert_eq!(s1.subsumed_by(&s2), p1.leq(&p2));
        Ok(())
    })
}

pub fn type_application_is_semantic(cases: u32) -> u32 {
    let m = a2();
    let tm = TypeModel::new(&m);
    run(cases, inputs(1..3), |(seed, ti, k, n, n2)| {
        let fty = ty(TYPES[ti]);
        let (a, b) = fty.as_arrow().unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let s = gen_set(&mut rng, m.waa(), &fty, k, n);
        let arg = gen_set(&mut rng, m.waa(), a, k, n2);
        let lhs = point(&m, k, b, &tm.interp(&s.apply(&arg), k, b));
        let rhs = m
            .apply(k, &fty, &tm.interp(&s, k, &fty), &tm.interp(&arg, k, a))
            .unwrap();
        prop_assert_eq!(lhs, point(&m, k, b, &rhs));
        Ok(())
    })
}

pub fn interpretation_ignores_high_strata(cases: u32) -> u32 {
    let m = a2();
    let tm = TypeModel::new(&m);
    run(cases, inputs(0..3), |(seed, ti, k, n, _)| {
        let t = ty(TYPES[ti]);
        let mut rng = StdRng::seed_from_u64(seed);
        let s = gen_set(&mut rng, m.waa(), &t, m.max_rank(), n);
        let full = point(&m, k, &t, &tm.interp(&s, k, &t));
        let cut = point(&m, k, &t, &tm.interp(&s.restrict(k, m.waa()), k, &t));
        prop_assert_eq!(full, cut);
        Ok(())
    })
}

pub fn domination_deciders_agree_with_order(cases: u32) -> u32 {
    let m = a2();
    let tm = TypeModel::new(&m);
    run(
        cases,
        (inputs(0..3), any::<prop::sample::Index>()),
        |((seed, ti, k, n, _), pick)| {
            let t = ty(TYPES[ti]);
            let mut rng = StdRng::seed_from_u64(seed);
            let s = gen_set(&mut rng, m.waa(), &t, k, n);
            let lat = m.lattice(k, &t).unwrap();
            let v = lat.elems()[pick.index(lat.len())].clone();
            let vv = Value::Point(v.clone());
            let lo = point(&m, k, &t, &tm.interp(&s, k, &t));
            prop_assert_eq!(tm.dominates_set(&vv, &s, k, &t).unwrap(), lo.leq(&v));
            let hi = point(&m, k, &t, &tm.dual_interp(&s, k, &t));
            prop_assert_eq!(tm.dual_dominated_set(&vv, &s, k, &t).unwrap(), v.leq(&hi));
            Ok(())
        },
    )
}

/// Exhaustive over A1 and A2 at every stratum.
pub fn representations_round_trip() -> usize {
    let sig = super::abc();
    let mut n = 0;
    for m in [Model::new(super::a1(&sig)), a2()] {
        let tm = TypeModel::new(&m);
        for t in TYPES.map(ty) {
            for k in 0..=m.max_rank() {
                let lat = m.lattice(k, &t).unwrap();
                let reps: Vec<_> = lat
                    .elems()
                    .iter()
                    .map(|p| tm.represent(&Value::Point(p.clone()), k, &t).unwrap())
                    .collect();
                for (p, rep) in lat.elems().iter().zip(&reps) {
                    rep.well_formed(&t, m.waa()).unwrap();
                    assert!(rep.max_stratum(m.waa()).unwrap_or(0) <= k);
                    assert_eq!(&point(&m, k, &t, &tm.interp(rep, k, &t)), p);
                    n += 1;
                }
                if lat.len() <= 500 {
                    for (p, r) in lat.elems().iter().zip(&reps) {
                        for (q, s) in lat.elems().iter().zip(&reps) {
                            assert_eq!(r.subsumed_by(s), p.leq(q), "k={k} {t}");
                        }
                    }
                }
            }
        }
    }
    n
}

pub fn dual_interpretation_of_states() {
    let m = a2();
    let tm = TypeModel::new(&m);
    let o = SimpleType::Base;
    for k in 0..=m.max_rank() {
        for q in 0..m.waa().num_states() {
            let v = tm.dual_interp_type(&IType::State(q), k, &o).as_set();
            let mut expected = m.waa().rank_le(k);
            expected.remove(q);
            assert_eq!(v, expected);
        }
    }
}
