//! The `lamy` command line.
//!
//! Exit status: 0 accepted / holds, 1 rejected, 2 inconclusive (oracle),
//! 64 usage, 65 malformed input, 66 unreadable file, 69 lattice or dual
//! automaton over the size cap, 70 internal error.

mod selftest;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::automaton::{
    accept_prefix, parse_regular_tree, parse_waa, solve_regular, Mode, OracleError, StateSet, Waa, WaaError,
};
use crate::model::{Model, ModelError, DEFAULT_CAP};
use crate::syntax::{bohm_prefix, parse_declarations, parse_term_file, Signature, Term};
use crate::typesys::{
    check_derivation, decide, derivation_signature, derive, derive_dual, dual_model, parse_derivation_file,
    render_derivation_file, DeriveError, IType, ITypeSet,
};

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NOINPUT: i32 = 66;
pub const EXIT_TOO_LARGE: i32 = 69;
pub const EXIT_INTERNAL: i32 = 70;

/// Environment variable for the default lattice cap.
pub const CAP_ENV: &str = "LAMY_CAP";

#[derive(Parser, Debug)]
#[command(
    name = "lamy",
    version,
    about = "Weak alternating automata over Böhm trees of λY-terms"
)]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Maximum number of elements of one enumerated lattice
    #[arg(long, env = CAP_ENV, default_value_t = DEFAULT_CAP, global = true)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Optimistic,
    Pessimistic,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a prefix of the Böhm tree of a term
    Bohm {
        term: PathBuf,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        fuel: usize,
    },
    /// Evaluate a term in the model and print the accepting states
    Eval {
        term: PathBuf,
        waa: PathBuf,
        /// States whose acceptance decides the exit status (default: initial)
        #[arg(long = "state")]
        states: Vec<String>,
    },
    /// Decide acceptance per state and produce verified certificates
    Check {
        term: PathBuf,
        waa: PathBuf,
        /// States to check (default: initial); `all` for every state
        #[arg(long = "state")]
        states: Vec<String>,
        /// Write one derivation file per state into this directory
        #[arg(long)]
        cert_dir: Option<PathBuf>,
    },
    /// Build a derivation of `⊢ M ≥ {q}`, or `⊢ M ≱ {q}` with --dual
    Derive {
        term: PathBuf,
        waa: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        dual: bool,
        /// Write the derivation here instead of standard output
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Check a derivation file
    Verify { derivation: PathBuf, waa: PathBuf },
    /// Game-based acceptance on a Böhm-tree prefix or a regular tree
    Oracle {
        /// Term file (omit when --tree is given)
        term: Option<PathBuf>,
        waa: Option<PathBuf>,
        /// Regular tree file solved exactly instead of a term prefix
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        fuel: usize,
        /// Treatment of cutoffs; both optimistic and pessimistic if absent
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Run the built-in property suites
    Selftest,
}

#[derive(Debug)]
pub(crate) struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Failure {
        let code = match e {
            ModelError::LatticeTooLarge { .. } => EXIT_TOO_LARGE,
            _ => EXIT_DATA,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<WaaError> for Failure {
    fn from(e: WaaError) -> Failure {
        let code = match e {
            WaaError::DualTooLarge { .. } => EXIT_TOO_LARGE,
            _ => EXIT_DATA,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<DeriveError> for Failure {
    fn from(e: DeriveError) -> Failure {
        match e {
            DeriveError::Model(m) => m.into(),
            DeriveError::Automaton(w) => w.into(),
            DeriveError::NotDerivable { .. } => Failure::new(EXIT_REJECT, e.to_string()),
            DeriveError::Internal(_) => Failure::new(EXIT_INTERNAL, e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Failure {
        Failure::new(EXIT_DATA, e.to_string())
    }
}

/// Runs the command line on `args` (including the program name) and
/// returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    if cli.cap == 0 {
        let _ = writeln!(err, "error: --cap must be positive");
        return EXIT_USAGE;
    }
    let mut ctx = Ctx {
        out,
        machine: cli.format == Format::Machine,
        cap: cli.cap,
    };
    match ctx.dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    machine: bool,
    cap: usize,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_NOINPUT, format!("{}: {e}", path.display())))
}

fn load_term(path: &Path) -> Result<(Signature, Term), Failure> {
    let text = read(path)?;
    let f =
        parse_term_file(&text).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))?;
    Ok((f.sig, f.term))
}

fn load_waa(path: &Path, sig: &Signature) -> Result<Waa, Failure> {
    let text = read(path)?;
    parse_waa(&text, sig).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn closed_base(t: &Term) -> Result<(), Failure> {
    if !t.ty().is_base() {
        return Err(Failure::new(
            EXIT_DATA,
            format!("term has type {}, expected o", t.ty()),
        ));
    }
    if let Some(x) = t.free_vars().keys().next() {
        return Err(Failure::new(EXIT_DATA, format!("term has a free variable `{x}`")));
    }
    Ok(())
}

/// States named on the command line, sorted by name; the initial state if
/// none are given.
fn select_states(waa: &Waa, names: &[String]) -> Result<Vec<usize>, Failure> {
    let mut out = Vec::new();
    if names.is_empty() {
        out.push(waa.initial());
    }
    for n in names {
        if n == "all" {
            out.extend(0..waa.num_states());
            continue;
        }
        out.push(
            waa.index(n)
                .ok_or_else(|| Failure::new(EXIT_USAGE, format!("unknown state `{n}`")))?,
        );
    }
    out.sort_by(|a, b| waa.name(*a).cmp(waa.name(*b)));
    out.dedup();
    Ok(out)
}

impl Ctx<'_> {
    fn emit(&mut self, text: impl std::fmt::Display) -> Result<(), Failure> {
        writeln!(self.out, "{text}").map_err(|e| Failure::new(EXIT_NOINPUT, e.to_string()))
    }

    fn dispatch(&mut self, cmd: Command) -> Result<i32, Failure> {
        match cmd {
            Command::Bohm { term, depth, fuel } => self.bohm(&term, depth, fuel),
            Command::Eval { term, waa, states } => self.eval(&term, &waa, &states),
            Command::Check {
                term,
                waa,
                states,
                cert_dir,
            } => self.check(&term, &waa, &states, cert_dir.as_deref()),
            Command::Derive {
                term,
                waa,
                state,
                dual,
                emit,
            } => self.derive(&term, &waa, &state, dual, emit.as_deref()),
            Command::Verify { derivation, waa } => self.verify(&derivation, &waa),
            Command::Oracle {
                term,
                waa,
                tree,
                state,
                depth,
                fuel,
                mode,
            } => self.oracle(
                term.as_deref(),
                waa.as_deref(),
                tree.as_deref(),
                state,
                depth,
                fuel,
                mode,
            ),
            Command::Selftest => {
                let (lines, ok) = selftest::run(self.cap);
                for (name, pass, detail) in lines {
                    if self.machine {
                        self.emit(json!({"suite": name, "pass": pass, "detail": detail}))?;
                    } else {
                        let verdict = if pass { "PASS" } else { "FAIL" };
                        self.emit(format!("{verdict} {name}: {detail}"))?;
                    }
                }
                Ok(if ok { EXIT_ACCEPT } else { EXIT_REJECT })
            }
        }
    }

    fn bohm(&mut self, path: &Path, depth: usize, fuel: usize) -> Result<i32, Failure> {
        let (_, t) = load_term(path)?;
        closed_base(&t)?;
        let p = bohm_prefix(&t, depth, fuel);
        let shown = p.word().unwrap_or_else(|| p.to_string());
        if self.machine {
            self.emit(json!({
                "prefix": p.to_string(),
                "word": p.word(),
                "nodes": p.node_count(),
                "complete": !p.has_cutoff(),
            }))?;
        } else {
            self.emit(shown)?;
        }
        Ok(EXIT_ACCEPT)
    }

    fn eval(&mut self, tp: &Path, wp: &Path, names: &[String]) -> Result<i32, Failure> {
        let (sig, t) = load_term(tp)?;
        closed_base(&t)?;
        let waa = load_waa(wp, &sig)?;
        let states = select_states(&waa, names)?;
        let model = Model::with_cap(waa, self.cap);
        let acc = model.accept_by_model(&t)?;
        let waa = model.waa();
        if self.machine {
            self.emit(json!({ "accepting": waa.sorted_names(acc) }))?;
        } else {
            self.emit(waa.fmt_set(acc))?;
        }
        Ok(if states.iter().all(|q| acc.contains(*q)) {
            EXIT_ACCEPT
        } else {
            EXIT_REJECT
        })
    }

    fn check(
        &mut self,
        tp: &Path,
        wp: &Path,
        names: &[String],
        cert_dir: Option<&Path>,
    ) -> Result<i32, Failure> {
        let (sig, t) = load_term(tp)?;
        closed_base(&t)?;
        let waa = load_waa(wp, &sig)?;
        let states = select_states(&waa, names)?;
        let model = Model::with_cap(waa, self.cap);
        let dual = dual_model(&model)?;
        let waa = model.waa();
        let set: StateSet = states.iter().copied().collect();
        let mut certs = decide(&model, &dual, &t, set)?;
        certs.sort_by(|a, b| waa.name(a.state).cmp(waa.name(b.state)));
        if let Some(dir) = cert_dir {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::new(EXIT_NOINPUT, format!("{}: {e}", dir.display())))?;
        }
        let mut all = true;
        for c in &certs {
            check_derivation(&c.derivation, &t, waa)
                .map_err(|v| Failure::new(EXIT_INTERNAL, format!("generated certificate rejected: {v}")))?;
            all &= c.accepted;
            let name = waa.name(c.state);
            let file = match cert_dir {
                Some(dir) => {
                    let f = dir.join(format!("{name}.deriv"));
                    fs::write(&f, render_derivation_file(&sig, &t, &c.derivation, waa))
                        .map_err(|e| Failure::new(EXIT_NOINPUT, format!("{}: {e}", f.display())))?;
                    Some(f)
                }
                None => None,
            };
            let verdict = if c.accepted { "accept" } else { "reject" };
            let j = &c.derivation.judgment;
            if self.machine {
                self.emit(json!({
                    "state": name,
                    "verdict": verdict,
                    "judgment": format!("⊢ M {} {}", j.polarity.symbol(), j.set.display(waa)),
                    "nodes": c.derivation.size(),
                    "verified": true,
                    "certificate": file.as_ref().map(|f| f.display().to_string()),
                }))?;
            } else {
                let mut line = format!(
                    "{name}: {verdict}  ⊢ M {} {}  ({} nodes, verified)",
                    j.polarity.symbol(),
                    j.set.display(waa),
                    c.derivation.size()
                );
                if let Some(f) = &file {
                    line.push_str(&format!("\n  certificate: {}", f.display()));
                }
                self.emit(line)?;
            }
        }
        Ok(if all { EXIT_ACCEPT } else { EXIT_REJECT })
    }

    fn derive(
        &mut self,
        tp: &Path,
        wp: &Path,
        state: &str,
        dual: bool,
        emit: Option<&Path>,
    ) -> Result<i32, Failure> {
        let (sig, t) = load_term(tp)?;
        closed_base(&t)?;
        let waa = load_waa(wp, &sig)?;
        let q = waa
            .index(state)
            .ok_or_else(|| Failure::new(EXIT_USAGE, format!("unknown state `{state}`")))?;
        let model = Model::with_cap(waa, self.cap);
        let target = ITypeSet::singleton(IType::State(q));
        let d = if dual {
            derive_dual(&dual_model(&model)?, &t, &target)?
        } else {
            derive(&model, &t, &target)?
        };
        let waa = model.waa();
        check_derivation(&d, &t, waa)
            .map_err(|v| Failure::new(EXIT_INTERNAL, format!("generated derivation rejected: {v}")))?;
        let text = render_derivation_file(&sig, &t, &d, waa);
        match emit {
            Some(f) => {
                fs::write(f, &text)
                    .map_err(|e| Failure::new(EXIT_NOINPUT, format!("{}: {e}", f.display())))?;
                if self.machine {
                    self.emit(json!({"derivation": f.display().to_string(), "nodes": d.size()}))?;
                } else {
                    self.emit(format!("wrote {} ({} nodes)", f.display(), d.size()))?;
                }
            }
            None => write!(self.out, "{text}").map_err(|e| Failure::new(EXIT_NOINPUT, e.to_string()))?,
        }
        Ok(EXIT_ACCEPT)
    }

    fn verify(&mut self, dp: &Path, wp: &Path) -> Result<i32, Failure> {
        let text = read(dp)?;
        let sig = derivation_signature(&text)
            .map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", dp.display())))?;
        let waa = load_waa(wp, &sig)?;
        let (t, d) = parse_derivation_file(&text, &waa)
            .map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", dp.display())))?;
        let canonical = render_derivation_file(&sig, &t, &d, &waa) == text;
        let mut result = check_derivation(&d, &t, &waa).map_err(|v| v.to_string());
        if result.is_ok() {
            let j = &d.judgment;
            if !j.path.0.is_empty() || !j.env.is_empty() {
                result = Err("root judgment must be about the whole term in the empty environment".into());
            } else if let Err(f) = closed_base(&t) {
                result = Err(f.message);
            }
        }
        match &result {
            Ok(()) => {
                let j = &d.judgment;
                if self.machine {
                    self.emit(json!({
                        "ok": true,
                        "judgment": format!("⊢ M {} {}", j.polarity.symbol(), j.set.display(&waa)),
                        "nodes": d.size(),
                        "canonical": canonical,
                    }))?;
                } else {
                    self.emit(format!(
                        "ok: ⊢ M {} {} ({} nodes)",
                        j.polarity.symbol(),
                        j.set.display(&waa),
                        d.size()
                    ))?;
                }
                Ok(EXIT_ACCEPT)
            }
            Err(msg) => {
                if self.machine {
                    self.emit(json!({"ok": false, "violation": msg}))?;
                } else {
                    self.emit(format!("violation: {msg}"))?;
                }
                Ok(EXIT_REJECT)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn oracle(
        &mut self,
        tp: Option<&Path>,
        wp: Option<&Path>,
        tree: Option<&Path>,
        state: Option<String>,
        depth: usize,
        fuel: usize,
        mode: Option<ModeArg>,
    ) -> Result<i32, Failure> {
        if let Some(tree) = tree {
            // with --tree the only positional argument is the automaton
            let wp = match (tp, wp) {
                (Some(w), None) => w,
                _ => return Err(Failure::new(EXIT_USAGE, "usage: oracle --tree TREE WAA")),
            };
            return self.oracle_tree(tree, wp, state, depth);
        }
        let (Some(tp), Some(wp)) = (tp, wp) else {
            return Err(Failure::new(EXIT_USAGE, "usage: oracle TERM WAA"));
        };
        let (sig, t) = load_term(tp)?;
        closed_base(&t)?;
        let waa = load_waa(wp, &sig)?;
        let q = self.one_state(&waa, state)?;
        let prefix = bohm_prefix(&t, depth, fuel);
        let complete = !prefix.has_cutoff();
        let verdict = match mode {
            Some(ModeArg::Exact) => {
                let w = accept_prefix(&waa, &prefix, Mode::Exact)?;
                Some(w.root().contains(q))
            }
            Some(ModeArg::Pessimistic) => {
                let w = accept_prefix(&waa, &prefix, Mode::Pessimistic)?;
                if w.root().contains(q) {
                    Some(true)
                } else if complete {
                    Some(false)
                } else {
                    None
                }
            }
            Some(ModeArg::Optimistic) => {
                let w = accept_prefix(&waa, &prefix, Mode::Optimistic)?;
                if !w.root().contains(q) {
                    Some(false)
                } else if complete {
                    Some(true)
                } else {
                    None
                }
            }
            None => {
                let pess = accept_prefix(&waa, &prefix, Mode::Pessimistic)?.root();
                let opt = accept_prefix(&waa, &prefix, Mode::Optimistic)?.root();
                if pess.contains(q) {
                    Some(true)
                } else if !opt.contains(q) {
                    Some(false)
                } else {
                    None
                }
            }
        };
        let model = Model::with_cap(waa, self.cap);
        let by_model = model.accept_by_model(&t)?.contains(q);
        if let Some(v) = verdict {
            if v != by_model {
                return Err(Failure::new(
                    EXIT_INTERNAL,
                    format!("oracle and model disagree at {}", model.waa().name(q)),
                ));
            }
        }
        self.report_oracle(model.waa().name(q), verdict, by_model, prefix.node_count())
    }

    fn oracle_tree(
        &mut self,
        tree: &Path,
        wp: &Path,
        state: Option<String>,
        depth: usize,
    ) -> Result<i32, Failure> {
        let text = read(tree)?;
        let (sig, offset, _) =
            parse_declarations(&text).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
        let rt = parse_regular_tree(&text[offset..], &sig)?;
        let waa = load_waa(wp, &sig)?;
        let q = self.one_state(&waa, state)?;
        let exact = solve_regular(&waa, &rt).root().contains(q);
        let prefix = rt.unfold(depth);
        let pess = accept_prefix(&waa, &prefix, Mode::Pessimistic)?
            .root()
            .contains(q);
        let opt = accept_prefix(&waa, &prefix, Mode::Optimistic)?.root().contains(q);
        if (pess && !exact) || (!opt && exact) {
            return Err(Failure::new(
                EXIT_INTERNAL,
                format!("prefix oracle contradicts the regular solver at {}", waa.name(q)),
            ));
        }
        let verdict = if exact { "accept" } else { "reject" };
        if self.machine {
            self.emit(
                json!({"state": waa.name(q), "verdict": verdict, "pessimistic": pess, "optimistic": opt}),
            )?;
        } else {
            self.emit(format!("{}: {verdict} (regular tree)", waa.name(q)))?;
        }
        Ok(if exact { EXIT_ACCEPT } else { EXIT_REJECT })
    }

    fn one_state(&self, waa: &Waa, state: Option<String>) -> Result<usize, Failure> {
        match state {
            None => Ok(waa.initial()),
            Some(n) => waa
                .index(&n)
                .ok_or_else(|| Failure::new(EXIT_USAGE, format!("unknown state `{n}`"))),
        }
    }

    fn report_oracle(
        &mut self,
        name: &str,
        verdict: Option<bool>,
        by_model: bool,
        nodes: usize,
    ) -> Result<i32, Failure> {
        let shown = match verdict {
            Some(true) => "accept",
            Some(false) => "reject",
            None => "inconclusive",
        };
        if self.machine {
            self.emit(json!({"state": name, "verdict": shown, "model": by_model, "prefix_nodes": nodes}))?;
        } else {
            let model = if by_model { "accept" } else { "reject" };
            self.emit(format!(
                "{name}: {shown} (prefix of {nodes} nodes; model: {model})"
            ))?;
        }
        Ok(match verdict {
            Some(true) => EXIT_ACCEPT,
            Some(false) => EXIT_REJECT,
            None => EXIT_INCONCLUSIVE,
        })
    }
}
