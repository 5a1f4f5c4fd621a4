#![allow(dead_code)]

use std::path::PathBuf;

use lamy::automaton::{parse_waa, Waa};
use lamy::syntax::{parse_term, parse_term_file, Signature, Term};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `a`, `b` unary and `c` nullary: a signature shared by both automata.
pub fn abc() -> Signature {
    Signature::new().with("a", 1).with("b", 1).with("c", 0)
}

pub fn a1(sig: &Signature) -> Waa {
    parse_waa(&fixture("a1.waa"), sig).unwrap()
}

pub fn a2(sig: &Signature) -> Waa {
    parse_waa(&fixture("a2.waa"), sig).unwrap()
}

pub fn term_file(name: &str) -> (Signature, Term) {
    let f = parse_term_file(&fixture(name)).unwrap();
    (f.sig, f.term)
}

pub fn term(src: &str) -> Term {
    parse_term(src, &abc()).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub const YFN: &str = "(Y F:((o -> o) -> o). \\g:(o -> o). g (b (F (\\x:o. g (g x))))) a";

/// Ten closed terms of type o over `abc()`.
pub const CORPUS: [&str; 10] = [
    "c",
    "a (b c)",
    "Y x:o. x",
    "Y x:o. a x",
    "Y x:o. b x",
    "Y x:o. a (b x)",
    YFN,
    "(\\f:(o -> o). \\x:o. f (f x)) a c",
    "(\\f:(o -> o). f (f (Y x:o. b (a x)))) a",
    "(Y F:(o -> o). \\x:o. a (F (b x))) c",
];
pub mod fuzz;
pub mod laws;
pub mod props;
pub mod semantics;
