//! Random intersection types and single-node derivation mutations that no
//! sound checker may accept.

use lamy::automaton::{StateSet, Waa};
use lamy::syntax::{PathStep, SimpleType, Term, TermKind};
use lamy::typesys::{Derivation, IType, ITypeSet, Polarity, Rule, Witness};
use rand::rngs::StdRng;
use rand::Rng;

/// A random well-formed type over `ty` of stratum at most `k`.
pub fn gen_type(rng: &mut StdRng, waa: &Waa, ty: &SimpleType, k: usize) -> Option<IType> {
    match ty.as_arrow() {
        None => {
            let qs: Vec<usize> = waa.rank_le(k).iter().collect();
            if qs.is_empty() {
                None
            } else {
                Some(IType::State(qs[rng.gen_range(0..qs.len())]))
            }
        }
        Some((a, b)) => {
            let t = gen_type(rng, waa, b, k)?;
            let n = rng.gen_range(0..3);
            let u = gen_set(rng, waa, a, t.stratum(waa), n);
            Some(IType::arrow(u, t))
        }
    }
}

pub fn gen_set(rng: &mut StdRng, waa: &Waa, ty: &SimpleType, k: usize, n: usize) -> ITypeSet {
    (0..n).filter_map(|_| gen_type(rng, waa, ty, k)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    Witness,
    Polarity,
    Path,
    Env,
    DropPremise,
    Rule,
    Conclusion,
}

pub const MUTATIONS: [Mutation; 7] = [
    Mutation::Witness,
    Mutation::Polarity,
    Mutation::Path,
    Mutation::Env,
    Mutation::DropPremise,
    Mutation::Rule,
    Mutation::Conclusion,
];

#[derive(PartialEq)]
enum Shape {
    Var,
    Const,
    App,
    Abs,
    Fix,
}

fn shape(t: &Term) -> Shape {
    match t.kind() {
        TermKind::Var(_) => Shape::Var,
        TermKind::Const(_) => Shape::Const,
        TermKind::App(..) => Shape::App,
        TermKind::Abs(..) => Shape::Abs,
        TermKind::Fix(..) => Shape::Fix,
    }
}

fn rule_shape(r: Rule) -> Option<Shape> {
    match r {
        Rule::Axiom => Some(Shape::Var),
        Rule::ConstNullary | Rule::ConstTrans => Some(Shape::Const),
        Rule::App => Some(Shape::App),
        Rule::Abs => Some(Shape::Abs),
        Rule::YOdd | Rule::YEven => Some(Shape::Fix),
        Rule::Intersect | Rule::Subsume => None,
    }
}

/// Applies `m` at node `pos` of `d`. `None` when the mutation does not apply
/// there.
pub fn mutate(
    d: &Derivation,
    pos: &[usize],
    m: Mutation,
    term: &Term,
    waa: &Waa,
    rng: &mut StdRng,
) -> Option<Derivation> {
    let mut out = d.clone();
    let root = pos.is_empty();
    let node = out.node_mut(pos)?;
    let sub = term.at(&node.judgment.path)?;
    match m {
        Mutation::Witness => {
            node.witness = match &node.witness {
                Witness::None => Witness::Binder(ITypeSet::new()),
                Witness::Split { k, s, t } => Witness::Split {
                    k: k + 1,
                    s: s.clone(),
                    t: t.clone(),
                },
                Witness::Tuple(tuple) => {
                    let mut tuple = tuple.clone();
                    let i = rng.gen_range(0..tuple.len());
                    let q = rng.gen_range(0..waa.num_states());
                    tuple[i] = StateSet(tuple[i].0 ^ (1 << q));
                    Witness::Tuple(tuple)
                }
                Witness::Binder(u) => {
                    let TermKind::Abs(_, a, _) = sub.kind() else {
                        return None;
                    };
                    let mut u2 = u.clone();
                    match gen_type(rng, waa, a, waa.max_rank()) {
                        Some(t) if !u.contains(&t) => {
                            u2.insert(t);
                        }
                        _ if !u.is_empty() => {
                            let first = u.iter().next().unwrap().clone();
                            u2.0.remove(&first);
                        }
                        _ => return None,
                    }
                    Witness::Binder(u2)
                }
            };
        }
        Mutation::Polarity if !root => {
            node.judgment.polarity = match node.judgment.polarity {
                Polarity::Pos => Polarity::Neg,
                Polarity::Neg => Polarity::Pos,
            };
        }
        Mutation::Path if !root => {
            let step = [PathStep::Fun, PathStep::Arg, PathStep::Body, PathStep::Lambda][rng.gen_range(0..4)];
            node.judgment.path = node.judgment.path.child(step);
        }
        Mutation::Env if !root => {
            node.judgment.env.push(("zz_fresh".to_string(), ITypeSet::new()));
        }
        Mutation::DropPremise => {
            if !matches!(
                node.rule,
                Rule::Subsume | Rule::App | Rule::Abs | Rule::YOdd | Rule::YEven
            ) {
                return None;
            }
            let i = rng.gen_range(0..node.premises.len());
            node.premises.remove(i);
        }
        Mutation::Rule => {
            let here = shape(&sub);
            let choices: Vec<Rule> = Rule::ALL
                .into_iter()
                .filter(|r| rule_shape(*r).is_some_and(|s| s != here))
                .collect();
            node.rule = choices[rng.gen_range(0..choices.len())];
        }
        Mutation::Conclusion => {
            let t = (0..20)
                .filter_map(|_| gen_type(rng, waa, sub.ty(), waa.max_rank()))
                .find(|t| {
                    !node.judgment.set.contains(t)
                        && (node.rule != Rule::Subsume
                            || !ITypeSet::singleton(t.clone()).subsumed_by(&node.premises[0].judgment.set))
                })?;
            node.judgment.set.insert(t);
        }
        _ => return None,
    }
    (&out != d).then_some(out)
}

/// Certificates for the corpus under A1, A2 and their duals, with every
/// subderivation.
pub fn valid_pool() -> Vec<(Term, usize, Derivation)> {
    use lamy::model::Model;
    use lamy::typesys::{decide, dual_model};
    let mut out = Vec::new();
    for (i, waa) in automata().into_iter().enumerate() {
        let model = Model::new(waa);
        let dual = dual_model(&model).unwrap();
        for src in super::CORPUS {
            let t = super::term(src);
            for c in decide(&model, &dual, &t, model.waa().all()).unwrap() {
                for p in c.derivation.positions() {
                    out.push((t.clone(), i, c.derivation.node(&p).unwrap().clone()));
                }
            }
        }
    }
    out
}

pub fn automata() -> Vec<Waa> {
    use lamy::automaton::{dualize, DEFAULT_DUAL_BOUND};
    let sig = super::abc();
    let (a1, a2) = (super::a1(&sig), super::a2(&sig));
    let d1 = dualize(&a1, DEFAULT_DUAL_BOUND).unwrap();
    let d2 = dualize(&a2, DEFAULT_DUAL_BOUND).unwrap();
    vec![a1, a2, d1, d2]
}

pub struct FuzzReport {
    pub valid_checked: usize,
    pub mutations_checked: usize,
    pub per_kind: Vec<(Mutation, usize)>,
    pub failures: Vec<String>,
}

/// Checks `valid` sampled derivations and `mutants` mutated ones.
pub fn fuzz_checker(seed: u64, valid: usize, mutants: usize) -> FuzzReport {
    use lamy::typesys::{check_derivation, format_position};
    use rand::SeedableRng;
    let mut rng = StdRng::seed_from_u64(seed);
    let automata = automata();
    let pool = valid_pool();
    let mut failures = Vec::new();
    for _ in 0..valid {
        let (t, i, d) = &pool[rng.gen_range(0..pool.len())];
        if let Err(v) = check_derivation(d, t, &automata[*i]) {
            failures.push(format!("valid derivation rejected: {v}"));
        }
    }
    let mut per_kind: Vec<(Mutation, usize)> = MUTATIONS.iter().map(|m| (*m, 0)).collect();
    let mut done = 0;
    let mut attempts = 0;
    while done < mutants && attempts < mutants * 100 {
        attempts += 1;
        let (t, i, d) = &pool[rng.gen_range(0..pool.len())];
        let positions = d.positions();
        let pos = &positions[rng.gen_range(0..positions.len())];
        let k = rng.gen_range(0..MUTATIONS.len());
        let Some(bad) = mutate(d, pos, MUTATIONS[k], t, &automata[*i], &mut rng) else {
            continue;
        };
        done += 1;
        per_kind[k].1 += 1;
        if check_derivation(&bad, t, &automata[*i]).is_ok() {
            failures.push(format!(
                "{:?} mutation at node {} accepted",
                MUTATIONS[k],
                format_position(pos)
            ));
        }
    }
    if done < mutants {
        failures.push(format!("only {done} mutations generated"));
    }
    FuzzReport {
        valid_checked: valid,
        mutations_checked: done,
        per_kind,
        failures,
    }
}
