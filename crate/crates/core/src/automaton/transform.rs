use std::collections::{BTreeMap, BTreeSet};

use super::{Alternatives, StateSet, Waa, WaaError};

/// Default limit on the number of tuples [`dualize`] may produce for a single
/// `(state, constant)` pair.
pub const DEFAULT_DUAL_BOUND: usize = 1 << 16;

/// Every tuple of subsets of `universe`, or `None` if there are more than
/// `bound` of them.
fn all_tuples(universe: StateSet, arity: usize, bound: usize) -> Option<Vec<Vec<StateSet>>> {
    let per = 1usize.checked_shl(universe.len() as u32)?;
    let total = (0..arity).try_fold(1usize, |acc, _| acc.checked_mul(per))?;
    if total > bound {
        return None;
    }
    let subsets: Vec<StateSet> = universe.subsets().collect();
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                subsets.iter().map(move |s| {
                    let mut t = prefix.clone();
                    t.push(*s);
                    t
                })
            })
            .collect();
    }
    Some(out)
}

/// Closes every transition upward: componentwise supersets within
/// `Q_{≤ρ(q)}` of an alternative become alternatives themselves.
pub fn monotone_completion(a: &Waa) -> Waa {
    let mut delta: BTreeMap<(usize, String), Alternatives> = BTreeMap::new();
    for ((q, c), alts) in a.delta() {
        let universe = a.rank_le(a.rank(*q));
        let mut closed = BTreeSet::new();
        for tuple in alts {
            let mut acc = vec![Vec::new()];
            for s in tuple {
                let free = universe.minus(*s);
                acc = acc
                    .into_iter()
                    .flat_map(|prefix: Vec<StateSet>| {
                        free.subsets().map(move |extra| {
                            let mut t = prefix.clone();
                            t.push(s.union(extra));
                            t
                        })
                    })
                    .collect();
            }
            closed.extend(acc);
        }
        delta.insert((*q, c.clone()), closed.into_iter().collect());
    }
    a.with_parts((0..a.num_states()).map(|q| a.rank(q)).collect(), delta)
}

/// The dual automaton: ranks shifted up by one, nullary acceptance
/// complemented, and `δ(q, a)` replaced by all tuples over `Q_{≤ρ(q)}` that
/// meet every original alternative in some component.
pub fn dualize(a: &Waa, bound: usize) -> Result<Waa, WaaError> {
    let ranks: Vec<usize> = (0..a.num_states()).map(|q| a.rank(q) + 1).collect();
    let mut delta: BTreeMap<(usize, String), Alternatives> = BTreeMap::new();
    for (c, arity) in a.sig().iter() {
        for q in 0..a.num_states() {
            let original = a.transitions(q, c);
            if arity == 0 {
                if original.is_empty() {
                    delta.insert((q, c.to_string()), vec![Vec::new()]);
                }
                continue;
            }
            let universe = a.rank_le(a.rank(q));
            let tuples = all_tuples(universe, arity, bound).ok_or_else(|| WaaError::DualTooLarge {
                state: a.name(q).to_string(),
                constant: c.to_string(),
                bound,
            })?;
            let hitting: Alternatives = tuples
                .into_iter()
                .filter(|t| {
                    original
                        .iter()
                        .all(|s| s.iter().zip(t).any(|(sj, tj)| !sj.inter(*tj).is_empty()))
                })
                .collect();
            if !hitting.is_empty() {
                delta.insert((q, c.to_string()), hitting);
            }
        }
    }
    Ok(a.with_parts(ranks, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::parse_waa;
    use crate::syntax::Signature;

    fn sig() -> Signature {
        Signature::new().with("a", 1).with("b", 1).with("c", 0)
    }

    fn a1() -> Waa {
        parse_waa("states: q@1\nq a -> ({q})\nq c -> ()\n", &sig()).unwrap()
    }

    fn a2() -> Waa {
        parse_waa(
            "states: q1@1 q2@2\nq1 a -> ({q1})\nq2 a -> ({q1,q2})\nq1 b -> ({})\nq2 b -> ({q2})\n",
            &sig(),
        )
        .unwrap()
    }

    #[test]
    fn completion_examples() {
        let c2 = monotone_completion(&a2());
        assert_eq!(c2.transitions(1, "a"), &[vec![StateSet(0b11)]]);
        assert_eq!(
            c2.transitions(0, "b"),
            &[vec![StateSet::EMPTY], vec![StateSet(0b01)]]
        );
        assert_eq!(c2.transitions(1, "b").len(), 2);
        assert_eq!(
            monotone_completion(&a1()).transitions(0, "a"),
            &[vec![StateSet(1)]]
        );
    }

    #[test]
    fn dual_of_a1() {
        let d = dualize(&a1(), DEFAULT_DUAL_BOUND).unwrap();
        assert_eq!(d.rank(0), 2);
        assert!(d.transitions(0, "c").is_empty());
        assert_eq!(d.transitions(0, "a"), &[vec![StateSet(1)]]);
        // b has no transitions in A1, so every tuple is a transversal
        assert_eq!(d.transitions(0, "b").len(), 2);
    }

    #[test]
    fn double_dual_is_completion() {
        for a in [a1(), a2()] {
            let dd = dualize(&dualize(&a, DEFAULT_DUAL_BOUND).unwrap(), DEFAULT_DUAL_BOUND).unwrap();
            assert_eq!(dd.delta(), monotone_completion(&a).delta());
        }
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(dualize(&a2(), 1), Err(WaaError::DualTooLarge { .. })));
    }
}
