use std::fmt;

use thiserror::Error;

use super::term::{Term, TermError};
use super::types::{Signature, SimpleType};

/// A byte offset together with its line and column (both 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("at {pos}: {err}")]
    Term { pos: Pos, err: TermError },
}

impl ParseError {
    fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        ParseError::Syntax { pos, msg: msg.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda,
    Y,
    Dot,
    Colon,
    LParen,
    RParen,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Lambda => write!(f, "`\\`"),
            Tok::Y => write!(f, "`Y`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str, base: Pos) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut line = base.line;
    let mut col = base.column;
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let pos = Pos {
            offset: base.offset + i,
            line,
            column: col,
        };
        let mut advance = |chars: &mut std::iter::Peekable<std::str::CharIndices>| {
            let (_, c) = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
        match c {
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    advance(&mut chars);
                }
            }
            c if c.is_whitespace() => advance(&mut chars),
            '\\' | 'λ' => {
                advance(&mut chars);
                out.push((Tok::Lambda, pos));
            }
            '.' => {
                advance(&mut chars);
                out.push((Tok::Dot, pos));
            }
            ':' => {
                advance(&mut chars);
                out.push((Tok::Colon, pos));
            }
            '(' => {
                advance(&mut chars);
                out.push((Tok::LParen, pos));
            }
            ')' => {
                advance(&mut chars);
                out.push((Tok::RParen, pos));
            }
            '-' => {
                advance(&mut chars);
                match chars.peek() {
                    Some(&(_, '>')) => {
                        advance(&mut chars);
                        out.push((Tok::Arrow, pos));
                    }
                    _ => return Err(ParseError::syntax(pos, "expected `->`")),
                }
            }
            '→' => {
                advance(&mut chars);
                out.push((Tok::Arrow, pos));
            }
            c if is_ident_char(c) => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    name.push(c);
                    advance(&mut chars);
                }
                if name == "Y" {
                    out.push((Tok::Y, pos));
                } else {
                    out.push((Tok::Ident(name), pos));
                }
            }
            other => return Err(ParseError::syntax(pos, format!("unexpected character `{other}`"))),
        }
    }
    let end = Pos {
        offset: base.offset + text.len(),
        line,
        column: col,
    };
    out.push((Tok::Eof, end));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    sig: &'a Signature,
    scope: Vec<(String, SimpleType)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let (tok, pos) = self.bump();
        if tok == want {
            Ok(())
        } else {
            Err(ParseError::syntax(pos, format!("expected {want}, found {tok}")))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.bump() {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (tok, pos) => Err(ParseError::syntax(
                pos,
                format!("expected identifier, found {tok}"),
            )),
        }
    }

    fn ty(&mut self) -> Result<SimpleType, ParseError> {
        let lhs = match self.bump() {
            (Tok::Ident(s), _) if s == "o" => SimpleType::Base,
            (Tok::LParen, _) => {
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                t
            }
            (tok, pos) => return Err(ParseError::syntax(pos, format!("expected type, found {tok}"))),
        };
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.ty()?;
            Ok(SimpleType::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::Lambda => {
                self.bump();
                let (x, ty) = self.binder()?;
                let body = self.scoped(&x, &ty, |p| p.term())?;
                Term::abs(&x, ty, body).map_err(|err| ParseError::Term { pos, err })
            }
            Tok::Y if self.at_y_binder() => {
                self.bump();
                let (x, ty) = self.binder()?;
                let body = self.scoped(&x, &ty, |p| p.term())?;
                Term::fix(&x, ty, body).map_err(|err| ParseError::Term { pos, err })
            }
            _ => self.application(),
        }
    }

    fn at_y_binder(&self) -> bool {
        *self.peek() == Tok::Y
            && matches!(self.toks.get(self.i + 1), Some((Tok::Ident(_), _)))
            && matches!(self.toks.get(self.i + 2), Some((Tok::Colon, _)))
    }

    fn binder(&mut self) -> Result<(String, SimpleType), ParseError> {
        let (x, _) = self.ident()?;
        self.expect(Tok::Colon)?;
        let ty = self.ty()?;
        self.expect(Tok::Dot)?;
        Ok((x, ty))
    }

    fn scoped<T>(
        &mut self,
        x: &str,
        ty: &SimpleType,
        f: impl FnOnce(&mut Self) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        self.scope.push((x.to_string(), ty.clone()));
        let r = f(self);
        self.scope.pop();
        r
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen | Tok::Y)
    }

    fn application(&mut self) -> Result<Term, ParseError> {
        let mut head = self.atom()?;
        loop {
            if *self.peek() == Tok::Lambda || self.at_y_binder() {
                let pos = self.pos();
                let arg = self.term()?;
                return Term::app(head, arg).map_err(|err| ParseError::Term { pos, err });
            }
            if !self.starts_atom() {
                return Ok(head);
            }
            let pos = self.pos();
            let arg = self.atom()?;
            head = Term::app(head, arg).map_err(|err| ParseError::Term { pos, err })?;
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.bump() {
            (Tok::LParen, _) => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            (Tok::Ident(name), _) => {
                if let Some((_, ty)) = self.scope.iter().rev().find(|(n, _)| *n == name) {
                    Ok(Term::var(&name, ty.clone()))
                } else if self.sig.contains(&name) {
                    Term::constant(&name, self.sig).map_err(|err| ParseError::Term { pos, err })
                } else {
                    Err(ParseError::Term {
                        pos,
                        err: TermError::UnboundVariable(name),
                    })
                }
            }
            (Tok::Y, _) => {
                // `Y M` where M is not written in binder form
                let arg = self.atom()?;
                Term::y_of(arg).map_err(|err| ParseError::Term { pos, err })
            }
            (tok, pos) => Err(ParseError::syntax(pos, format!("expected term, found {tok}"))),
        }
    }
}

/// Parses a closed term against `sig`.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    parse_term_at(
        text,
        sig,
        Pos {
            offset: 0,
            line: 1,
            column: 1,
        },
    )
}

fn parse_term_at(text: &str, sig: &Signature, base: Pos) -> Result<Term, ParseError> {
    let toks = lex(text, base)?;
    let mut p = Parser {
        toks,
        i: 0,
        sig,
        scope: Vec::new(),
    };
    let t = p.term()?;
    match p.peek() {
        Tok::Eof => Ok(t),
        tok => Err(ParseError::syntax(p.pos(), format!("unexpected {tok}"))),
    }
}

/// Parses a simple type such as `(o -> o) -> o`.
pub fn parse_type(text: &str) -> Result<SimpleType, ParseError> {
    let toks = lex(
        text,
        Pos {
            offset: 0,
            line: 1,
            column: 1,
        },
    )?;
    let mut p = Parser {
        toks,
        i: 0,
        sig: &Signature::default(),
        scope: Vec::new(),
    };
    let t = p.ty()?;
    match p.peek() {
        Tok::Eof => Ok(t),
        tok => Err(ParseError::syntax(p.pos(), format!("unexpected {tok}"))),
    }
}

/// A term file: leading `const NAME... : TYPE` declarations, then one term.
#[derive(Clone, Debug)]
pub struct TermFile {
    pub sig: Signature,
    pub term: Term,
}

/// Splits the `const` declarations off a term file. Returns the signature and
/// the byte offset and line where the term text starts.
pub fn parse_declarations(text: &str) -> Result<(Signature, usize, usize), ParseError> {
    let mut sig = Signature::new();
    let mut offset = 0;
    for (idx, line) in text.split_inclusive('\n').enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        let lineno = idx + 1;
        if content.is_empty() {
            offset += line.len();
            continue;
        }
        let Some(rest) = content.strip_prefix("const") else {
            return Ok((sig, offset, lineno));
        };
        if !rest.starts_with(char::is_whitespace) {
            return Ok((sig, offset, lineno));
        }
        let here = Pos {
            offset,
            line: lineno,
            column: 1,
        };
        let (names, ty) = rest
            .split_once(':')
            .ok_or_else(|| ParseError::syntax(here, "expected `const NAME... : TYPE`"))?;
        let ty = parse_type(ty).map_err(|_| ParseError::syntax(here, "malformed constant type"))?;
        if ty.order() > 1 {
            return Err(ParseError::syntax(
                here,
                format!("constant type {ty} has order greater than one"),
            ));
        }
        let names: Vec<&str> = names.split_whitespace().collect();
        if names.is_empty() {
            return Err(ParseError::syntax(here, "no constant names declared"));
        }
        for name in names {
            if name == "Y" || name == "o" || !name.chars().all(is_ident_char) {
                return Err(ParseError::syntax(here, format!("bad constant name `{name}`")));
            }
            if let Some(prev) = sig.insert(name, ty.arity()) {
                if prev != ty.arity() {
                    return Err(ParseError::syntax(
                        here,
                        format!("constant `{name}` declared twice with different types"),
                    ));
                }
            }
        }
        offset += line.len();
    }
    Ok((sig, offset, text.split_inclusive('\n').count() + 1))
}

pub fn parse_term_file(text: &str) -> Result<TermFile, ParseError> {
    let (sig, offset, line) = parse_declarations(text)?;
    let term = parse_term_at(
        &text[offset..],
        &sig,
        Pos {
            offset,
            line,
            column: 1,
        },
    )?;
    Ok(TermFile { sig, term })
}

/// Renders a term file that [`parse_term_file`] reads back.
pub fn render_term_file(sig: &Signature, term: &Term) -> String {
    let mut by_arity: std::collections::BTreeMap<usize, Vec<&str>> = Default::default();
    for (name, arity) in sig.iter() {
        by_arity.entry(arity).or_default().push(name);
    }
    let mut out = String::new();
    for (arity, names) in by_arity {
        out.push_str(&format!(
            "const {} : {}\n",
            names.join(" "),
            SimpleType::first_order(arity)
        ));
    }
    out.push_str(&format!("{term}\n"));
    out
}
