use std::collections::BTreeMap;

use super::{Alternatives, StateSet, Waa, WaaError};
use crate::syntax::{is_ident_char, Signature};

fn syntax(line: usize, msg: impl Into<String>) -> WaaError {
    WaaError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses the line format
///
/// ```text
/// states: q1@1 q2@2
/// initial: q2
/// q2 a -> ({q1,q2})
/// q1 b -> ({})
/// q c -> ()
/// ```
///
/// against `sig`. A missing `(state, constant)` line means no transitions.
pub fn parse_waa(text: &str, sig: &Signature) -> Result<Waa, WaaError> {
    let mut states: Option<Vec<(String, usize)>> = None;
    let mut initial: Option<(String, usize)> = None;
    let mut rules: Vec<(usize, String, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("states:") {
            if states.is_some() {
                return Err(syntax(line, "duplicate `states:` header"));
            }
            let mut list = Vec::new();
            for item in rest.split_whitespace() {
                let (name, rank) = item
                    .split_once('@')
                    .ok_or_else(|| syntax(line, format!("expected name@rank, found `{item}`")))?;
                if name.is_empty() || !name.chars().all(is_ident_char) {
                    return Err(syntax(line, format!("bad state name `{name}`")));
                }
                let rank: usize = rank
                    .parse()
                    .map_err(|_| syntax(line, format!("bad rank in `{item}`")))?;
                list.push((name.to_string(), rank));
            }
            states = Some(list);
        } else if let Some(rest) = content.strip_prefix("initial:") {
            if initial.is_some() {
                return Err(syntax(line, "duplicate `initial:` header"));
            }
            initial = Some((rest.trim().to_string(), line));
        } else {
            let (lhs, rhs) = content
                .split_once("->")
                .ok_or_else(|| syntax(line, "expected `STATE CONSTANT -> TUPLES`"))?;
            let mut words = lhs.split_whitespace();
            let (Some(q), Some(a), None) = (words.next(), words.next(), words.next()) else {
                return Err(syntax(line, "expected `STATE CONSTANT` before `->`"));
            };
            rules.push((line, q.to_string(), a.to_string(), rhs.trim().to_string()));
        }
    }
    let states = states.ok_or_else(|| syntax(1, "missing `states:` header"))?;
    let index = |name: &str| states.iter().position(|(n, _)| n == name);
    let initial = match initial {
        Some((name, line)) => {
            index(&name).ok_or_else(|| syntax(line, format!("unknown initial state `{name}`")))?
        }
        None => 0,
    };

    let mut delta: BTreeMap<(usize, String), Alternatives> = BTreeMap::new();
    for (line, q, a, rhs) in rules {
        let qi = index(&q).ok_or(WaaError::UnknownState(q.clone()))?;
        if !sig.contains(&a) {
            return Err(WaaError::UnknownConstant(a));
        }
        if delta.contains_key(&(qi, a.clone())) {
            return Err(syntax(line, format!("duplicate transition line for `{q} {a}`")));
        }
        let mut alts = Vec::new();
        for alt in rhs.split('|') {
            alts.push(parse_tuple(alt.trim(), line, &index)?);
        }
        delta.insert((qi, a), alts);
    }
    Waa::new(states, initial, sig.clone(), delta)
}

fn parse_tuple(
    text: &str,
    line: usize,
    index: &impl Fn(&str) -> Option<usize>,
) -> Result<Vec<StateSet>, WaaError> {
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| syntax(line, format!("expected a tuple `( ... )`, found `{text}`")))?
        .trim();
    let mut out = Vec::new();
    let mut rest = inner;
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('{')
            .ok_or_else(|| syntax(line, format!("expected `{{` in `{text}`")))?;
        let close = body
            .find('}')
            .ok_or_else(|| syntax(line, format!("unclosed `{{` in `{text}`")))?;
        let mut set = StateSet::EMPTY;
        for name in body[..close].split(',') {
            let name = name.trim();
            if name.is_empty() {
                continue;
            }
            let q = index(name).ok_or_else(|| WaaError::UnknownState(name.to_string()))?;
            set.insert(q);
        }
        out.push(set);
        rest = body[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
            if rest.is_empty() {
                return Err(syntax(line, format!("trailing `,` in `{text}`")));
            }
        } else if !rest.is_empty() {
            return Err(syntax(line, format!("expected `,` between sets in `{text}`")));
        }
    }
    Ok(out)
}
