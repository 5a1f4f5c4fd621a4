use crate::automaton::parse_waa;
use crate::model::{Model, Value};
use crate::syntax::{parse_term_file, parse_type, SimpleType};
use crate::typesys::{
    check_derivation, decide, derivation_signature, dual_model, parse_derivation_file, TypeModel,
};

const A1: &str = include_str!("../../fixtures/a1.waa");
const A2: &str = include_str!("../../fixtures/a2.waa");
const YFN: &str = include_str!("../../fixtures/yfn.lam");
const TOWER2: &str = include_str!("../../fixtures/tower2.lam");
const EXAMPLE2: &str = include_str!("../../fixtures/example2.deriv");

type Outcome = Result<String, String>;
type Line = (String, bool, String);
type Suite = (&'static str, fn(usize) -> Outcome);

/// Runs every suite; returns `(name, passed, detail)` lines and overall success.
pub(crate) fn run(cap: usize) -> (Vec<Line>, bool) {
    let suites: [Suite; 5] = [
        ("certificates", certificates),
        ("example2", example2),
        ("omega", omega),
        ("roundtrip", roundtrip),
        ("order", order),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, f) in suites {
        let (pass, detail) = match f(cap) {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        ok &= pass;
        lines.push((name.to_string(), pass, detail));
    }
    (lines, ok)
}

fn certificates(cap: usize) -> Outcome {
    let mut n = 0;
    for (src, waa_text) in [(YFN, A2), (TOWER2, A1)] {
        let f = parse_term_file(src).map_err(|e| e.to_string())?;
        let waa = parse_waa(waa_text, &f.sig).map_err(|e| e.to_string())?;
        let model = Model::with_cap(waa, cap);
        let dual = dual_model(&model).map_err(|e| e.to_string())?;
        let all = model.waa().all();
        let acc = model.accept_by_model(&f.term).map_err(|e| e.to_string())?;
        for c in decide(&model, &dual, &f.term, all).map_err(|e| e.to_string())? {
            check_derivation(&c.derivation, &f.term, model.waa()).map_err(|v| v.to_string())?;
            if c.accepted != acc.contains(c.state) {
                return Err(format!("verdict mismatch at {}", model.waa().name(c.state)));
            }
            n += 1;
        }
    }
    Ok(format!("{n} certificates checked"))
}

fn example2(_cap: usize) -> Outcome {
    let sig = derivation_signature(EXAMPLE2).map_err(|e| e.to_string())?;
    let waa = parse_waa(A2, &sig).map_err(|e| e.to_string())?;
    let (t, d) = parse_derivation_file(EXAMPLE2, &waa).map_err(|e| e.to_string())?;
    check_derivation(&d, &t, &waa).map_err(|v| v.to_string())?;
    Ok(format!("{} nodes", d.size()))
}

fn omega(cap: usize) -> Outcome {
    let mut seen = Vec::new();
    for (waa_text, decls) in [
        (A1, "const c : o\nconst a : o -> o\n"),
        (A2, "const a b : o -> o\n"),
    ] {
        let f = parse_term_file(&format!("{decls}Y x:o. x")).map_err(|e| e.to_string())?;
        let waa = parse_waa(waa_text, &f.sig).map_err(|e| e.to_string())?;
        let expected = waa.even_states();
        let model = Model::with_cap(waa, cap);
        let got = model.accept_by_model(&f.term).map_err(|e| e.to_string())?;
        if got != expected {
            return Err(format!("Ω evaluates to {}", model.waa().fmt_set(got)));
        }
        seen.push(model.waa().fmt_set(got));
    }
    Ok(format!("A1 {}, A2 {}", seen[0], seen[1]))
}

fn a2_model(cap: usize) -> Result<Model, String> {
    let sig = crate::syntax::Signature::new().with("a", 1).with("b", 1);
    Ok(Model::with_cap(
        parse_waa(A2, &sig).map_err(|e| e.to_string())?,
        cap,
    ))
}

fn roundtrip(cap: usize) -> Outcome {
    let model = a2_model(cap)?;
    let tm = TypeModel::new(&model);
    let mut n = 0;
    for ty in ["o", "o -> o", "(o -> o) -> o"] {
        let ty = parse_type(ty).map_err(|e| e.to_string())?;
        for k in 0..=model.max_rank() {
            for p in model.lattice(k, &ty).map_err(|e| e.to_string())?.elems() {
                let rep = tm
                    .represent(&Value::Point(p.clone()), k, &ty)
                    .map_err(|e| e.to_string())?;
                let back = model
                    .materialize(k, &ty, &tm.interp(&rep, k, &ty))
                    .map_err(|e| e.to_string())?;
                if &back != p {
                    return Err(format!("roundtrip fails at stratum {k}, type {ty}"));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{n} elements"))
}

fn order(cap: usize) -> Outcome {
    let model = a2_model(cap)?;
    let tm = TypeModel::new(&model);
    let ty = SimpleType::arrow(SimpleType::Base, SimpleType::Base);
    let k = model.max_rank();
    let lat = model.lattice(k, &ty).map_err(|e| e.to_string())?;
    let reps = lat
        .elems()
        .iter()
        .map(|p| tm.represent(&Value::Point(p.clone()), k, &ty))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let mut n = 0;
    for (i, p) in lat.elems().iter().enumerate() {
        for (j, q) in lat.elems().iter().enumerate() {
            if reps[i].subsumed_by(&reps[j]) != p.leq(q) {
                return Err(format!("order disagreement between elements {i} and {j}"));
            }
            n += 1;
        }
    }
    Ok(format!("{n} pairs"))
}
