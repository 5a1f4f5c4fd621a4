//! The model against reduction, the acceptance game and the type system.

use lamy::automaton::{
    accept_prefix, dualize, parse_regular_tree, solve_regular, Mode, Waa, DEFAULT_DUAL_BOUND,
};
use lamy::model::Model;
use lamy::syntax::{bohm_prefix, contract_at, redexes};
use lamy::typesys::{
    check_derivation, decide, derive, derive_dual, dual_model, DeriveError, IType, ITypeSet,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn automata() -> Vec<(String, Waa)> {
    let sig = super::abc();
    let mut out = Vec::new();
    for (name, a) in [("A1", super::a1(&sig)), ("A2", super::a2(&sig))] {
        let d = dualize(&a, DEFAULT_DUAL_BOUND).unwrap();
        out.push((name.to_string(), a));
        out.push((format!("dual {name}"), d));
    }
    out
}

pub fn evaluation_is_invariant_under_reduction() -> usize {
    let models: Vec<Model> = automata().into_iter().map(|(_, a)| Model::new(a)).collect();
    let mut rng = StdRng::seed_from_u64(7);
    let start: Vec<_> = super::CORPUS.iter().map(|s| super::term(s)).collect();
    let expected: Vec<Vec<_>> = start
        .iter()
        .map(|t| models.iter().map(|m| m.accept_by_model(t).unwrap()).collect())
        .collect();
    let mut cur = start.clone();
    let mut steps = 0;
    let mut turn = 0;
    // round-robin over the corpus, restarting a term once it is normal or large
    while steps < 100 {
        let i = turn % cur.len();
        turn += 1;
        let mut rs = redexes(&cur[i]);
        if rs.is_empty() || cur[i].size() > 400 {
            cur[i] = start[i].clone();
            rs = redexes(&cur[i]);
        }
        if rs.is_empty() {
            continue;
        }
        let at = &rs[rng.gen_range(0..rs.len())];
        cur[i] = contract_at(&cur[i], at).expect("redex position");
        for (m, e) in models.iter().zip(&expected[i]) {
            assert_eq!(
                m.accept_by_model(&cur[i]).unwrap(),
                *e,
                "{} after a step",
                super::CORPUS[i]
            );
        }
        steps += 1;
    }
    steps
}

pub fn accepting_and_rejecting_states_partition() -> usize {
    let mut n = 0;
    for (name, a) in automata() {
        let model = Model::new(a);
        let dual = dual_model(&model).unwrap();
        let all = model.waa().all();
        for src in super::CORPUS {
            let t = super::term(src);
            let acc = model.accept_by_model(&t).unwrap();
            for c in decide(&model, &dual, &t, all).unwrap() {
                assert_eq!(c.accepted, acc.contains(c.state));
                check_derivation(&c.derivation, &t, model.waa()).unwrap();
                let target = ITypeSet::singleton(IType::State(c.state));
                let other = if c.accepted {
                    derive_dual(&dual, &t, &target)
                } else {
                    derive(&model, &t, &target)
                };
                assert!(
                    matches!(other, Err(DeriveError::NotDerivable { .. })),
                    "{name}, {src}: both polarities derivable at {}",
                    model.waa().name(c.state)
                );
                n += 1;
            }
        }
    }
    n
}

/// Regular trees paired with terms whose Böhm trees unfold them.
const REGULAR: [(&str, &str); 5] = [
    ("root: v\nv: a v", "Y x:o. a x"),
    ("root: v\nv: b v", "Y x:o. b x"),
    ("root: v0\nv0: a v1\nv1: a v2\nv2: c", "a (a c)"),
    ("root: v0\nv0: a v1\nv1: b v0", "Y x:o. a (b x)"),
    (
        "root: v0\nv0: a v1\nv1: b v2\nv2: a v3\nv3: a v4\nv4: b v2",
        "a (b (Y x:o. a (a (b x))))",
    ),
];

pub fn game_solver_model_and_prefixes_agree() -> usize {
    let mut n = 0;
    let sig = super::abc();
    for (name, a) in automata() {
        let model = Model::new(a.clone());
        for (tree_src, term_src) in REGULAR {
            let tree = parse_regular_tree(tree_src, &sig).unwrap();
            let t = super::term(term_src);
            let exact = solve_regular(&a, &tree).root();
            assert_eq!(exact, model.accept_by_model(&t).unwrap(), "{name}: {term_src}");
            n += 1;
            for depth in [1, 4, 12] {
                let p = tree.unfold(depth);
                assert_eq!(p, bohm_prefix(&t, depth, 10_000), "{term_src} at depth {depth}");
                let lo = accept_prefix(&a, &p, Mode::Pessimistic).unwrap().root();
                let hi = accept_prefix(&a, &p, Mode::Optimistic).unwrap().root();
                assert!(
                    lo.is_subset(exact) && exact.is_subset(hi),
                    "{name}: {term_src} at depth {depth}"
                );
            }
        }
    }
    n
}

pub fn finite_trees_are_decided_exactly_by_prefixes() {
    let sig = super::abc();
    for (name, a) in automata() {
        let tree = parse_regular_tree(REGULAR[2].0, &sig).unwrap();
        assert!(tree.is_acyclic());
        let p = tree.unfold(8);
        assert!(!p.has_cutoff());
        let exact = accept_prefix(&a, &p, Mode::Exact).unwrap().root();
        assert_eq!(exact, solve_regular(&a, &tree).root(), "{name}");
    }
}

pub fn bohm_words_match_closed_forms() {
    // a^(2^(2^(i-1))) c for the towers
    for (i, n) in [(1, 2), (2, 4), (3, 16)] {
        let (_, t) = super::term_file(&format!("tower{i}.lam"));
        let expected = format!("{}c", "a ".repeat(n));
        assert_eq!(bohm_prefix(&t, 40, 100_000).word().unwrap(), expected);
    }
    // a b a^2 b a^4 b a^8 ...
    let mut expected = Vec::new();
    let mut n = 1;
    while expected.len() < 40 {
        expected.extend(std::iter::repeat_n("a", n));
        expected.push("b");
        n *= 2;
    }
    expected.truncate(40);
    let (_, t) = super::term_file("yfn.lam");
    let word = bohm_prefix(&t, 40, 100_000).word().unwrap();
    assert_eq!(word, expected.join(" "));
}
