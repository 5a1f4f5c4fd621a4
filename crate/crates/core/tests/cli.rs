mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixture_path as fx;

fn lamy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamy"))
        .args(args)
        .env_remove("LAMY_CAP")
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn check_yfn_accepts_at_q2_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = lamy(&[
        "check",
        p(&fx("yfn.lam")),
        p(&fx("a2.waa")),
        "--state",
        "q2",
        "--cert-dir",
        p(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("q2: accept"), "{out}");
    let cert = dir.path().join("q2.deriv");
    assert!(out.contains(&format!("certificate: {}", cert.display())));
    let v = lamy(&["verify", p(&cert), p(&fx("a2.waa"))]);
    assert_eq!(code(&v), 0);
}

#[test]
fn bohm_prefix_of_yfn() {
    let o = lamy(&["bohm", p(&fx("yfn.lam")), "--depth", "12"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "a b a a b a a a a b a a");
}

#[test]
fn verify_worked_example() {
    let o = lamy(&["verify", p(&fx("example2.deriv")), p(&fx("a2.waa"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("ok"));
}

#[test]
fn weakened_example_is_rejected_at_the_split() {
    let text = common::fixture("example2.deriv");
    let line = text
        .lines()
        .find(|l| l.trim_start().starts_with("YEven"))
        .unwrap();
    let (head, _) = line.rsplit_once("T=").unwrap();
    let bad = text.replacen(line, &format!("{head}T={{q2}}"), 1);
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.deriv");
    std::fs::write(&f, bad).unwrap();
    let o = lamy(&["verify", p(&f), p(&fx("a2.waa"))]);
    assert_eq!(code(&o), 1);
    let all = format!("{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(all.contains("YEven"), "{all}");
}

#[test]
fn emitted_derivations_verify_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let omega = dir.path().join("omega.lam");
    std::fs::write(&omega, "const a b : o -> o\nY x:o. x\n").unwrap();
    for (term, waa, state, dual) in [
        (fx("yfn.lam"), "a2.waa", "q2", false),
        (fx("tower2.lam"), "a1.waa", "q", false),
        (fx("yfn.lam"), "a2.waa", "q1", false),
        (omega.clone(), "a2.waa", "q1", true),
    ] {
        let f = dir.path().join(format!("{state}-{dual}.deriv"));
        let waa_path = fx(waa);
        let mut args = vec![
            "derive",
            p(&term),
            p(&waa_path),
            "--state",
            state,
            "--emit",
            p(&f),
        ];
        if dual {
            args.push("--dual");
        }
        assert_eq!(code(&lamy(&args)), 0);
        let first = std::fs::read(&f).unwrap();
        let v = lamy(&["--format", "machine", "verify", p(&f), p(&fx(waa))]);
        assert_eq!(code(&v), 0);
        let json: serde_json::Value = serde_json::from_str(stdout(&v).trim()).unwrap();
        assert_eq!(json["canonical"], true);
        assert_eq!(code(&lamy(&args)), 0);
        assert_eq!(std::fs::read(&f).unwrap(), first, "{} at {state}", term.display());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let omega = dir.path().join("omega.lam");
    std::fs::write(&omega, "const a b : o -> o\nY x:o. x\n").unwrap();
    let garbage = dir.path().join("garbage.lam");
    std::fs::write(&garbage, "const a : o -> o\n(\\x:o. \n").unwrap();
    let a2 = fx("a2.waa");
    let yfn = fx("yfn.lam");

    assert_eq!(code(&lamy(&["eval", p(&omega), p(&a2), "--state", "q2"])), 0);
    assert_eq!(code(&lamy(&["check", p(&omega), p(&a2), "--state", "q1"])), 1);
    assert_eq!(
        code(&lamy(&[
            "oracle",
            p(&yfn),
            p(&a2),
            "--state",
            "q2",
            "--depth",
            "30"
        ])),
        2
    );
    assert_eq!(code(&lamy(&["frobnicate"])), 64);
    assert_eq!(code(&lamy(&["bohm"])), 64);
    assert_eq!(code(&lamy(&["check", p(&garbage), p(&a2)])), 65);
    assert_eq!(code(&lamy(&["check", p(&fx("tower1.lam")), p(&a2)])), 65);
    assert_eq!(
        code(&lamy(&["check", p(&dir.path().join("missing.lam")), p(&a2)])),
        66
    );
    assert_eq!(code(&lamy(&["--cap", "2", "check", p(&yfn), p(&a2)])), 69);
    assert_eq!(code(&lamy(&["check", p(&yfn), p(&a2), "--state", "nope"])), 64);
}

#[test]
fn cap_is_read_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_lamy"))
        .args(["check", p(&fx("yfn.lam")), p(&fx("a2.waa"))])
        .env("LAMY_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 69);
}

#[test]
fn check_agrees_with_conclusive_oracle_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let omega = dir.path().join("omega.lam");
    std::fs::write(&omega, "const a b : o -> o\nY x:o. x\n").unwrap();
    let cases = [
        (fx("yfn.lam"), fx("a2.waa"), vec!["q1", "q2"]),
        (omega.clone(), fx("a2.waa"), vec!["q1", "q2"]),
        (fx("tower1.lam"), fx("a1.waa"), vec!["q"]),
        (fx("tower2.lam"), fx("a1.waa"), vec!["q"]),
        (fx("tower3.lam"), fx("a1.waa"), vec!["q"]),
    ];
    let mut conclusive = 0;
    for (term, waa, states) in cases {
        for q in states {
            let o = lamy(&["oracle", p(&term), p(&waa), "--state", q, "--depth", "24"]);
            let c = lamy(&["check", p(&term), p(&waa), "--state", q]);
            match code(&o) {
                2 => {}
                v => {
                    assert_eq!(code(&c), v, "{} at {q}", term.display());
                    conclusive += 1;
                }
            }
        }
    }
    assert!(conclusive >= 4);
}

#[test]
fn selftest_passes() {
    let o = lamy(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn regular_tree_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("ab.tree");
    std::fs::write(&tree, "const a b : o -> o\nroot: v0\nv0: a v1\nv1: b v0\n").unwrap();
    let sig = dir.path().join("sig.lam");
    std::fs::write(&sig, "const a b : o -> o\nY x:o. a (b x)\n").unwrap();
    let o = lamy(&["oracle", "--tree", p(&tree), p(&fx("a2.waa")), "--state", "q2"]);
    let c = lamy(&["check", p(&sig), p(&fx("a2.waa")), "--state", "q2"]);
    assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&o), code(&c));
}
