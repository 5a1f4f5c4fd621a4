//! Exhaustive checks of the stratified model's structural laws on small
//! lattices, and of the type system against it.

use lamy::model::{Model, Point, Value};
use lamy::syntax::{parse_type, SimpleType};

fn models() -> Vec<(&'static str, Model)> {
    let sig = super::abc();
    vec![
        ("A1", Model::new(super::a1(&sig))),
        ("A2", Model::new(super::a2(&sig))),
    ]
}

fn types() -> Vec<SimpleType> {
    ["o", "o -> o", "(o -> o) -> o"]
        .iter()
        .map(|t| parse_type(t).unwrap())
        .collect()
}

fn pt(v: Value, m: &Model, k: usize, ty: &SimpleType) -> Point {
    m.materialize(k, ty, &v).unwrap()
}

fn elems(m: &Model, k: usize, ty: &SimpleType) -> Vec<Point> {
    m.lattice(k, ty).unwrap().elems().to_vec()
}

pub fn galois_connections() -> usize {
    let mut n = 0;
    for (name, m) in models() {
        for ty in types() {
            for k in 1..=m.max_rank() {
                let hi = elems(&m, k, &ty);
                let lo = elems(&m, k - 1, &ty);
                for d in &hi {
                    let dd = pt(m.down(k, &ty, &Value::Point(d.clone())).unwrap(), &m, k - 1, &ty);
                    for e in &lo {
                        let ev = Value::Point(e.clone());
                        let sup = pt(m.lift_sup(k, &ty, &ev).unwrap(), &m, k, &ty);
                        let inf = pt(m.lift_inf(k, &ty, &ev).unwrap(), &m, k, &ty);
                        assert_eq!(dd.leq(e), d.leq(&sup), "{name} k={k} {ty}: down/sup");
                        assert_eq!(e.leq(&dd), inf.leq(d), "{name} k={k} {ty}: inf/down");
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

pub fn lifts_are_sections_of_down() -> usize {
    let mut n = 0;
    for (name, m) in models() {
        for ty in types() {
            for k in 1..=m.max_rank() {
                for e in elems(&m, k - 1, &ty) {
                    let ev = Value::Point(e.clone());
                    for lifted in [m.lift_inf(k, &ty, &ev).unwrap(), m.lift_sup(k, &ty, &ev).unwrap()] {
                        let back = pt(m.down(k, &ty, &lifted).unwrap(), &m, k - 1, &ty);
                        assert_eq!(back, e, "{name} k={k} {ty}");
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

pub fn decomposition() -> usize {
    let mut n = 0;
    for (name, m) in models() {
        for ty in types() {
            for k in 1..=m.max_rank() {
                for d in elems(&m, k, &ty) {
                    let dv = Value::Point(d.clone());
                    let (low, bar) = m.decompose(k, &ty, &dv).unwrap();
                    let lifted = m.lift_inf(k, &ty, &low).unwrap();
                    let j = pt(m.join(k, &ty, &[lifted, bar]).unwrap(), &m, k, &ty);
                    assert_eq!(j, d, "{name} k={k} {ty}");
                    n += 1;
                }
            }
        }
    }
    n
}

pub fn application_commutes_with_strata() -> usize {
    let mut n = 0;
    for (name, m) in models() {
        for fty in types().into_iter().filter(|t| !t.is_base()) {
            let (arg_ty, res_ty) = fty.as_arrow().map(|(a, r)| (a.clone(), r.clone())).unwrap();
            for k in 1..=m.max_rank() {
                let fs = elems(&m, k, &fty);
                let args = elems(&m, k, &arg_ty);
                for f in &fs {
                    let fv = Value::Point(f.clone());
                    let fd = m.down(k, &fty, &fv).unwrap();
                    for e in &args {
                        let ev = Value::Point(e.clone());
                        let lhs = m.down(k, &res_ty, &m.apply(k, &fty, &fv, &ev).unwrap()).unwrap();
                        let rhs = m
                            .apply(k - 1, &fty, &fd, &m.down(k, &arg_ty, &ev).unwrap())
                            .unwrap();
                        assert_eq!(
                            pt(lhs, &m, k - 1, &res_ty),
                            pt(rhs, &m, k - 1, &res_ty),
                            "{name} k={k} {fty}"
                        );
                        n += 1;
                    }
                }
                for d in elems(&m, k - 1, &fty) {
                    let dv = Value::Point(d);
                    for e in &args {
                        let ev = Value::Point(e.clone());
                        let ed = m.down(k, &arg_ty, &ev).unwrap();
                        let inner = m.apply(k - 1, &fty, &dv, &ed).unwrap();
                        let lhs = m.apply(k, &fty, &m.lift_inf(k, &fty, &dv).unwrap(), &ev).unwrap();
                        let rhs = m.lift_inf(k, &res_ty, &inner).unwrap();
                        assert_eq!(
                            pt(lhs, &m, k, &res_ty),
                            pt(rhs, &m, k, &res_ty),
                            "{name} k={k} {fty} inf"
                        );
                        let lhs = m.apply(k, &fty, &m.lift_sup(k, &fty, &dv).unwrap(), &ev).unwrap();
                        let rhs = m.lift_sup(k, &res_ty, &inner).unwrap();
                        assert_eq!(
                            pt(lhs, &m, k, &res_ty),
                            pt(rhs, &m, k, &res_ty),
                            "{name} k={k} {fty} sup"
                        );
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

fn brute_fix(m: &Model, k: usize, ty: &SimpleType, f: &Point) -> Point {
    let fty = SimpleType::arrow(ty.clone(), ty.clone());
    let fv = Value::Point(f.clone());
    let lower = if k == 0 {
        None
    } else {
        let fd = pt(m.down(k, &fty, &fv).unwrap(), m, k - 1, &fty);
        Some(brute_fix(m, k - 1, ty, &fd))
    };
    let cands: Vec<Point> = elems(m, k, ty)
        .into_iter()
        .filter(|d| {
            let fd = pt(m.apply(k, &fty, &fv, &Value::Point(d.clone())).unwrap(), m, k, ty);
            let post = if k.is_multiple_of(2) {
                d.leq(&fd)
            } else {
                fd.leq(d)
            };
            let refines = match &lower {
                None => true,
                Some(l) => &pt(m.down(k, ty, &Value::Point(d.clone())).unwrap(), m, k - 1, ty) == l,
            };
            post && refines
        })
        .collect();
    let lat = m.lattice(k, ty).unwrap();
    if k.is_multiple_of(2) {
        cands.iter().fold(lat.bottom().clone(), |a, d| a.join(d))
    } else {
        cands.iter().fold(lat.top().clone(), |a, d| a.meet(d))
    }
}

pub fn fixpoints_match_brute_force() -> usize {
    let mut checked = 0;
    for (name, m) in models() {
        for ty in types() {
            let fty = SimpleType::arrow(ty.clone(), ty.clone());
            for k in 0..=m.max_rank() {
                let Ok(lat) = m.lattice(k, &fty) else { continue };
                if lat.len() > 5000 {
                    continue;
                }
                for f in lat.elems() {
                    let fv = Value::Point(f.clone());
                    let x = m.fixpoint(k, &ty, &fv).unwrap();
                    let fx = pt(
                        m.apply(k, &fty, &fv, &Value::Point(x.clone())).unwrap(),
                        &m,
                        k,
                        &ty,
                    );
                    assert_eq!(fx, x, "{name} k={k} {ty}: not a fixpoint");
                    assert_eq!(brute_fix(&m, k, &ty, f), x, "{name} k={k} {ty}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100, "only {checked} functions checked");
    checked
}
