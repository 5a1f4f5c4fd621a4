//! Text form of derivations.
//!
//! ```text
//! const a b : o -> o
//! term: a (b c)
//! App | - | ⊢ @ ≥ {q} | -
//!   ConstTrans | - | ⊢ @f ≥ {{q}->q} | tuple=({q})
//!   ...
//! ```
//!
//! Premises follow their conclusion, indented two more spaces. The fields
//! are the rule, the environment (`-` or `x:{...}; y:{...}`), the judgment
//! and the witness (`-`, `tuple=(...)`, `U={...}` or `k=2; S={...}; T={...}`).

use std::fmt::Write as _;

use thiserror::Error;

use super::deriv::{Derivation, Judgment, Polarity, Rule, Witness};
use super::types::parse_itype_set;
use crate::automaton::Waa;
use crate::syntax::{parse_declarations, parse_term, render_term_file, Signature, Term, TermPath};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DerivationParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> DerivationParseError {
    DerivationParseError {
        line,
        message: message.into(),
    }
}

pub fn render_derivation(d: &Derivation, waa: &Waa) -> String {
    let mut out = String::new();
    render_node(d, waa, 0, &mut out);
    out
}

/// A complete derivation file: declarations, the term, then the tree.
pub fn render_derivation_file(sig: &Signature, term: &Term, d: &Derivation, waa: &Waa) -> String {
    let header = render_term_file(sig, term);
    let (decls, term_line) = header
        .trim_end_matches('\n')
        .rsplit_once('\n')
        .map(|(a, b)| (format!("{a}\n"), b.to_string()))
        .unwrap_or_else(|| (String::new(), header.trim_end().to_string()));
    format!("{decls}term: {term_line}\n{}", render_derivation(d, waa))
}

fn render_node(d: &Derivation, waa: &Waa, depth: usize, out: &mut String) {
    let j = &d.judgment;
    let env = if j.env.is_empty() {
        "-".to_string()
    } else {
        j.env
            .iter()
            .map(|(x, s)| format!("{x}:{}", s.display(waa)))
            .collect::<Vec<_>>()
            .join("; ")
    };
    let witness = match &d.witness {
        Witness::None => "-".to_string(),
        Witness::Tuple(t) => format!(
            "tuple=({})",
            t.iter().map(|s| waa.fmt_set(*s)).collect::<Vec<_>>().join(",")
        ),
        Witness::Binder(u) => format!("U={}", u.display(waa)),
        Witness::Split { k, s, t } => {
            format!("k={k}; S={}; T={}", s.display(waa), t.display(waa))
        }
    };
    let _ = writeln!(
        out,
        "{:indent$}{} | {} | ⊢ {} {} {} | {}",
        "",
        d.rule,
        env,
        j.path,
        j.polarity.symbol(),
        j.set.display(waa),
        witness,
        indent = 2 * depth
    );
    for p in &d.premises {
        render_node(p, waa, depth + 1, out);
    }
}

/// Signature declared at the top of a derivation file, needed to read the
/// automaton before the rest of the file.
pub fn derivation_signature(text: &str) -> Result<Signature, DerivationParseError> {
    parse_declarations(text)
        .map(|(sig, _, _)| sig)
        .map_err(|e| err(0, e.to_string()))
}

/// Reads a derivation file against an automaton over its signature.
pub fn parse_derivation_file(text: &str, waa: &Waa) -> Result<(Term, Derivation), DerivationParseError> {
    let (sig, offset, first_line) = parse_declarations(text).map_err(|e| err(0, e.to_string()))?;
    let mut lines = text[offset..]
        .lines()
        .enumerate()
        .map(|(i, l)| (i + first_line, l));
    let (lineno, term_line) = lines
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| err(first_line, "missing `term:` line"))?;
    let src = term_line
        .strip_prefix("term:")
        .ok_or_else(|| err(lineno, "expected `term: ...`"))?;
    let term = parse_term(src, &sig).map_err(|e| err(lineno, e.to_string()))?;
    let body: Vec<(usize, &str)> = lines
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .collect();
    let d = parse_tree(&body, waa)?;
    Ok((term, d))
}

/// Reads the tree lines alone.
pub fn parse_derivation(text: &str, waa: &Waa) -> Result<Derivation, DerivationParseError> {
    let body: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .collect();
    parse_tree(&body, waa)
}

fn parse_tree(lines: &[(usize, &str)], waa: &Waa) -> Result<Derivation, DerivationParseError> {
    let mut stack: Vec<Derivation> = Vec::new();
    for (i, &(lineno, line)) in lines.iter().enumerate() {
        let spaces = line.len() - line.trim_start_matches(' ').len();
        if spaces % 2 != 0 {
            return Err(err(lineno, "indentation must be a multiple of two spaces"));
        }
        let depth = spaces / 2;
        if i > 0 && depth == 0 {
            return Err(err(lineno, "more than one root"));
        }
        if depth > stack.len() {
            return Err(err(lineno, "unexpected indentation"));
        }
        while stack.len() > depth {
            let done = stack.pop().unwrap();
            stack.last_mut().unwrap().premises.push(done);
        }
        stack.push(parse_line(line[spaces..].trim_end(), lineno, waa)?);
    }
    while stack.len() > 1 {
        let done = stack.pop().unwrap();
        stack.last_mut().unwrap().premises.push(done);
    }
    stack.pop().ok_or_else(|| err(0, "empty derivation"))
}

fn parse_line(line: &str, lineno: usize, waa: &Waa) -> Result<Derivation, DerivationParseError> {
    let fields: Vec<&str> = line.split(" | ").collect();
    let [rule, env, judgment, witness] = fields[..] else {
        return Err(err(lineno, "expected `RULE | ENV | ⊢ @PATH ≥ {...} | WITNESS`"));
    };
    let rule = Rule::from_name(rule.trim()).ok_or_else(|| err(lineno, format!("unknown rule `{rule}`")))?;
    let set = |s: &str| parse_itype_set(s.trim(), waa).map_err(|m| err(lineno, m));

    let env = if env.trim() == "-" {
        Vec::new()
    } else {
        env.split("; ")
            .map(|b| {
                let (x, s) = b
                    .split_once(':')
                    .ok_or_else(|| err(lineno, format!("malformed binding `{b}`")))?;
                Ok((x.trim().to_string(), set(s)?))
            })
            .collect::<Result<Vec<_>, _>>()?
    };

    let rest = judgment
        .trim()
        .strip_prefix('⊢')
        .ok_or_else(|| err(lineno, "judgment must start with `⊢`"))?
        .trim_start();
    let (path, rest) = rest
        .split_once(' ')
        .ok_or_else(|| err(lineno, "malformed judgment"))?;
    let path = TermPath::parse(path).ok_or_else(|| err(lineno, format!("malformed path `{path}`")))?;
    let (polarity, s) = if let Some(s) = rest.strip_prefix("≥") {
        (Polarity::Pos, s)
    } else if let Some(s) = rest.strip_prefix("≱") {
        (Polarity::Neg, s)
    } else {
        return Err(err(lineno, "expected `≥` or `≱`"));
    };
    let judgment = Judgment {
        env,
        path,
        polarity,
        set: set(s)?,
    };

    let witness = parse_witness(witness.trim(), lineno, waa)?;
    Ok(Derivation {
        rule,
        judgment,
        witness,
        premises: Vec::new(),
    })
}

fn parse_witness(w: &str, lineno: usize, waa: &Waa) -> Result<Witness, DerivationParseError> {
    let set = |s: &str| parse_itype_set(s.trim(), waa).map_err(|m| err(lineno, m));
    if w == "-" {
        return Ok(Witness::None);
    }
    if let Some(inner) = w.strip_prefix("tuple=(").and_then(|r| r.strip_suffix(')')) {
        let mut parts = Vec::new();
        let mut start = None;
        for (i, c) in inner.char_indices() {
            match c {
                '{' => start = Some(i),
                '}' => {
                    let s = start.take().ok_or_else(|| err(lineno, "malformed tuple"))?;
                    parts.push(
                        waa.parse_set(&inner[s..=i])
                            .map_err(|e| err(lineno, e.to_string()))?,
                    );
                }
                _ => {}
            }
        }
        return Ok(Witness::Tuple(parts));
    }
    if let Some(u) = w.strip_prefix("U=") {
        return Ok(Witness::Binder(set(u)?));
    }
    if let Some(rest) = w.strip_prefix("k=") {
        let parts: Vec<&str> = rest.split("; ").collect();
        if let [k, s, t] = parts[..] {
            let k = k
                .parse()
                .map_err(|_| err(lineno, format!("malformed stratum `{k}`")))?;
            let s = s.strip_prefix("S=").ok_or_else(|| err(lineno, "expected `S=`"))?;
            let t = t.strip_prefix("T=").ok_or_else(|| err(lineno, "expected `T=`"))?;
            return Ok(Witness::Split {
                k,
                s: set(s)?,
                t: set(t)?,
            });
        }
    }
    Err(err(lineno, format!("malformed witness `{w}`")))
}
