use std::collections::BTreeMap;

use thiserror::Error;

use super::{StateSet, Waa};
use crate::syntax::{is_ident_char, BohmPrefix, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("cutoff leaf reached in exact mode")]
    CutoffInExactMode,
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("`{label}` expects {expected} children, found {found}")]
    Arity {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// How [`accept_prefix`] treats cutoff leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// cutoffs are errors
    Exact,
    /// a cutoff is won from every state
    Optimistic,
    /// a cutoff is lost from every state
    Pessimistic,
}

/// Winning sets per node (prefix nodes in preorder, or graph vertices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinTable {
    pub sets: Vec<StateSet>,
    pub root: usize,
}

impl WinTable {
    pub fn root(&self) -> StateSet {
        self.sets[self.root]
    }

    pub fn get(&self, node: usize) -> StateSet {
        self.sets[node]
    }
}

/// Evaluates the acceptance game bottom-up on a finite prefix.
pub fn accept_prefix(a: &Waa, p: &BohmPrefix, mode: Mode) -> Result<WinTable, OracleError> {
    fn go(a: &Waa, p: &BohmPrefix, mode: Mode, out: &mut Vec<StateSet>) -> Result<StateSet, OracleError> {
        let id = out.len();
        out.push(StateSet::EMPTY);
        let win = match p {
            BohmPrefix::Cutoff => match mode {
                Mode::Exact => return Err(OracleError::CutoffInExactMode),
                Mode::Optimistic => a.all(),
                Mode::Pessimistic => StateSet::EMPTY,
            },
            BohmPrefix::Omega => a.even_states(),
            BohmPrefix::Node { label, children } => {
                let arity = a
                    .sig()
                    .arity(label)
                    .ok_or_else(|| OracleError::UnknownConstant(label.clone()))?;
                if arity != children.len() {
                    return Err(OracleError::Arity {
                        label: label.clone(),
                        expected: arity,
                        found: children.len(),
                    });
                }
                let mut wins = Vec::with_capacity(children.len());
                for c in children {
                    wins.push(go(a, c, mode, out)?);
                }
                a.step_states(label, &wins, a.all())
            }
        };
        out[id] = win;
        Ok(win)
    }
    let mut out = Vec::new();
    go(a, p, mode, &mut out)?;
    Ok(WinTable { sets: out, root: 0 })
}

/// A finite graph presenting a regular tree: vertex `v` is labelled by a
/// constant and has one successor per argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularTree {
    pub names: Vec<String>,
    pub labels: Vec<String>,
    pub succ: Vec<Vec<usize>>,
    pub root: usize,
}

impl RegularTree {
    pub fn new(
        labels: Vec<String>,
        succ: Vec<Vec<usize>>,
        root: usize,
        sig: &Signature,
    ) -> Result<RegularTree, OracleError> {
        let names = (0..labels.len()).map(|i| format!("v{i}")).collect();
        let t = RegularTree {
            names,
            labels,
            succ,
            root,
        };
        t.validate(sig)?;
        Ok(t)
    }

    fn validate(&self, sig: &Signature) -> Result<(), OracleError> {
        for (v, label) in self.labels.iter().enumerate() {
            let arity = sig
                .arity(label)
                .ok_or_else(|| OracleError::UnknownConstant(label.clone()))?;
            if arity != self.succ[v].len() {
                return Err(OracleError::Arity {
                    label: label.clone(),
                    expected: arity,
                    found: self.succ[v].len(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The unfolding from the root, cut at `depth`.
    pub fn unfold(&self, depth: usize) -> BohmPrefix {
        fn go(t: &RegularTree, v: usize, depth: usize) -> BohmPrefix {
            if depth == 0 {
                return BohmPrefix::Cutoff;
            }
            BohmPrefix::Node {
                label: t.labels[v].clone(),
                children: t.succ[v].iter().map(|&w| go(t, w, depth - 1)).collect(),
            }
        }
        go(self, self.root, depth)
    }

    pub fn is_acyclic(&self) -> bool {
        // 0 = unvisited, 1 = on stack, 2 = done
        fn dfs(t: &RegularTree, v: usize, mark: &mut [u8]) -> bool {
            match mark[v] {
                1 => return false,
                2 => return true,
                _ => {}
            }
            mark[v] = 1;
            let ok = t.succ[v].iter().all(|&w| dfs(t, w, mark));
            mark[v] = 2;
            ok
        }
        let mut mark = vec![0u8; self.len()];
        (0..self.len()).all(|v| dfs(self, v, &mut mark))
    }
}

/// Parses `root: v0` followed by one `vertex: label successor...` line per
/// vertex.
pub fn parse_regular_tree(text: &str, sig: &Signature) -> Result<RegularTree, OracleError> {
    let err = |line: usize, msg: String| OracleError::Syntax { line, msg };
    let mut root = None;
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (head, rest) = content
            .split_once(':')
            .ok_or_else(|| err(line, "expected `NAME: ...`".into()))?;
        let head = head.trim();
        if head == "root" {
            root = Some((rest.trim().to_string(), line));
            continue;
        }
        if head.is_empty() || !head.chars().all(is_ident_char) {
            return Err(err(line, format!("bad vertex name `{head}`")));
        }
        let words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        if words.is_empty() {
            return Err(err(line, format!("vertex `{head}` has no label")));
        }
        lines.push((line, head.to_string(), words));
    }
    let mut index = BTreeMap::new();
    for (i, (line, name, _)) in lines.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(err(*line, format!("vertex `{name}` defined twice")));
        }
    }
    let mut labels = Vec::new();
    let mut succ = Vec::new();
    for (line, _, words) in &lines {
        labels.push(words[0].clone());
        let mut s = Vec::new();
        for w in &words[1..] {
            s.push(
                *index
                    .get(w)
                    .ok_or_else(|| err(*line, format!("unknown vertex `{w}`")))?,
            );
        }
        succ.push(s);
    }
    let (root_name, root_line) = root.ok_or_else(|| err(1, "missing `root:` line".into()))?;
    let root = *index
        .get(&root_name)
        .ok_or_else(|| err(root_line, format!("unknown root vertex `{root_name}`")))?;
    let t = RegularTree {
        names: lines.into_iter().map(|(_, n, _)| n).collect(),
        labels,
        succ,
        root,
    };
    t.validate(sig)?;
    Ok(t)
}

/// Exact winning sets on a regular tree. Ranks are processed in ascending
/// order; the slice of rank `k` is a greatest fixpoint for even `k` and a
/// least fixpoint for odd `k`, with lower ranks already fixed.
pub fn solve_regular(a: &Waa, t: &RegularTree) -> WinTable {
    let n = t.len();
    let mut win = vec![StateSet::EMPTY; n];
    for k in 0..=a.max_rank() {
        let slice = a.rank_eq(k);
        if slice.is_empty() {
            continue;
        }
        let even = k % 2 == 0;
        if even {
            for w in win.iter_mut() {
                *w = w.union(slice);
            }
        }
        loop {
            let mut changed = false;
            for v in 0..n {
                let args: Vec<StateSet> = t.succ[v].iter().map(|&w| win[w]).collect();
                let next = a.step_states(&t.labels[v], &args, slice);
                let cur = win[v].inter(slice);
                if next != cur {
                    win[v] = win[v].minus(slice).union(next);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    WinTable {
        sets: win,
        root: t.root,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{dualize, parse_waa, DEFAULT_DUAL_BOUND};

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

    fn node(label: &str, children: Vec<BohmPrefix>) -> BohmPrefix {
        BohmPrefix::Node {
            label: label.into(),
            children,
        }
    }

    #[test]
    fn prefix_examples() {
        let aac = node("a", vec![node("a", vec![node("c", vec![])])]);
        assert_eq!(
            accept_prefix(&a1(), &aac, Mode::Exact).unwrap().root(),
            StateSet(1)
        );
        let abx = node("a", vec![node("b", vec![BohmPrefix::Cutoff])]);
        let w = accept_prefix(&a2(), &abx, Mode::Pessimistic).unwrap();
        assert!(w.root().contains(0));
        assert_eq!(
            accept_prefix(&a1(), &BohmPrefix::Omega, Mode::Exact)
                .unwrap()
                .root(),
            StateSet::EMPTY
        );
        assert!(accept_prefix(&a1(), &abx, Mode::Exact).is_err());
    }

    #[test]
    fn regular_examples() {
        let aloop = parse_regular_tree("root: v\nv: a v\n", &sig()).unwrap();
        assert_eq!(solve_regular(&a2(), &aloop).get(0), StateSet::EMPTY);
        let bloop = parse_regular_tree("root: v\nv: b v\n", &sig()).unwrap();
        assert_eq!(solve_regular(&a2(), &bloop).get(0), StateSet(0b11));
        let chain = parse_regular_tree("root: v0\nv0: a v1\nv1: c\n", &sig()).unwrap();
        assert_eq!(solve_regular(&a1(), &chain).get(chain.root), StateSet(1));
        let d = dualize(&a1(), DEFAULT_DUAL_BOUND).unwrap();
        assert_eq!(solve_regular(&d, &aloop).get(0), StateSet(1));
    }

    #[test]
    fn regular_tree_errors() {
        assert!(parse_regular_tree("root: v\nv: a\n", &sig()).is_err());
        assert!(parse_regular_tree("root: w\nv: c\n", &sig()).is_err());
        assert!(parse_regular_tree("v: c\n", &sig()).is_err());
    }
}
