//! C interface to `lamy`.
//!
//! Terms and automata are opaque handles created by the `*_parse`
//! functions and released with the matching `*_free`. Every fallible
//! function returns a [`LamyStatus`]; on failure [`lamy_last_error`] holds a
//! message for the calling thread. Strings returned through out-parameters
//! are owned by the caller and must be released with [`lamy_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lamy::automaton::parse_waa;
use lamy::model::{Model, ModelError};
use lamy::syntax::{bohm_prefix, parse_term_file, Signature, Term};
use lamy::typesys::{
    check_derivation, decide, derivation_signature, dual_model, parse_derivation_file,
    render_derivation_file, DeriveError,
};
use lamy::{StateSet, Waa};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LamyStatus {
    Ok = 0,
    /// The automaton rejects, or the derivation is invalid.
    Rejected = 1,
    NullArgument = 2,
    InvalidUtf8 = 3,
    ParseError = 4,
    LatticeTooLarge = 5,
    UnknownState = 6,
    Internal = 7,
}

/// A parsed term together with its signature.
pub struct LamyTerm {
    sig: Signature,
    term: Term,
}

/// An automaton over the signature of the term it was parsed against.
pub struct LamyAutomaton {
    waa: Waa,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn fail(status: LamyStatus, msg: impl Into<String>) -> LamyStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> LamyStatus) -> LamyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(LamyStatus::Internal, "panic inside lamy"),
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, LamyStatus> {
    if p.is_null() {
        return Err(fail(LamyStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(LamyStatus::InvalidUtf8, "string is not valid UTF-8"))
}

fn model_status(e: &ModelError) -> LamyStatus {
    match e {
        ModelError::LatticeTooLarge { .. } => LamyStatus::LatticeTooLarge,
        _ => LamyStatus::ParseError,
    }
}

fn derive_status(e: &DeriveError) -> LamyStatus {
    match e {
        DeriveError::Model(m) => model_status(m),
        DeriveError::Automaton(_) => LamyStatus::LatticeTooLarge,
        DeriveError::NotDerivable { .. } => LamyStatus::Rejected,
        DeriveError::Internal(_) => LamyStatus::Internal,
    }
}

unsafe fn give_string(out: *mut *mut c_char, s: String) {
    if !out.is_null() {
        *out = CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw();
    }
}

/// Message for the last failure on this thread. Valid until the next call
/// into the library from the same thread.
#[no_mangle]
pub extern "C" fn lamy_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must be null or a string obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn lamy_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a term file (`const` declarations followed by a closed term).
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamy_term_parse(src: *const c_char, out: *mut *mut LamyTerm) -> LamyStatus {
    guard(|| {
        if out.is_null() {
            return fail(LamyStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let src = match text(src) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match parse_term_file(src) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(LamyTerm {
                    sig: f.sig,
                    term: f.term,
                }));
                LamyStatus::Ok
            }
            Err(e) => fail(LamyStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `t` must be null or a handle from [`lamy_term_parse`], freed once.
#[no_mangle]
pub unsafe extern "C" fn lamy_term_free(t: *mut LamyTerm) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Parses an automaton over the signature of `term`.
///
/// # Safety
/// `term` must be a live term handle, `src` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lamy_automaton_parse(
    term: *const LamyTerm,
    src: *const c_char,
    out: *mut *mut LamyAutomaton,
) -> LamyStatus {
    guard(|| {
        if out.is_null() || term.is_null() {
            return fail(LamyStatus::NullArgument, "null argument");
        }
        *out = ptr::null_mut();
        let src = match text(src) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match parse_waa(src, &(*term).sig) {
            Ok(waa) => {
                *out = Box::into_raw(Box::new(LamyAutomaton { waa }));
                LamyStatus::Ok
            }
            Err(e) => fail(LamyStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `a` must be null or a handle from [`lamy_automaton_parse`], freed once.
#[no_mangle]
pub unsafe extern "C" fn lamy_automaton_free(a: *mut LamyAutomaton) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of states; state `i` is bit `i` of the masks below.
///
/// # Safety
/// `a` must be a live automaton handle.
#[no_mangle]
pub unsafe extern "C" fn lamy_automaton_state_count(a: *const LamyAutomaton) -> usize {
    if a.is_null() {
        return 0;
    }
    (*a).waa.num_states()
}

/// Index of the state called `name`.
///
/// # Safety
/// `a` must be a live automaton handle, `name` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lamy_automaton_state_index(
    a: *const LamyAutomaton,
    name: *const c_char,
    out: *mut usize,
) -> LamyStatus {
    guard(|| {
        if a.is_null() || out.is_null() {
            return fail(LamyStatus::NullArgument, "null argument");
        }
        let name = match text(name) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match (*a).waa.index(name) {
            Some(i) => {
                *out = i;
                LamyStatus::Ok
            }
            None => fail(LamyStatus::UnknownState, format!("unknown state `{name}`")),
        }
    })
}

/// Bit mask of the states from which the automaton accepts the Böhm tree
/// of the term. `cap` bounds enumerated lattices (0 for the default).
///
/// # Safety
/// Handles must be live; `mask` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lamy_accepting_states(
    term: *const LamyTerm,
    a: *const LamyAutomaton,
    cap: usize,
    mask: *mut u64,
) -> LamyStatus {
    guard(|| {
        if term.is_null() || a.is_null() || mask.is_null() {
            return fail(LamyStatus::NullArgument, "null argument");
        }
        let model = make_model(&(*a).waa, cap);
        match model.accept_by_model(&(*term).term) {
            Ok(s) => {
                *mask = s.0;
                LamyStatus::Ok
            }
            Err(e) => fail(model_status(&e), e.to_string()),
        }
    })
}

fn make_model(waa: &Waa, cap: usize) -> Model {
    if cap == 0 {
        Model::new(waa.clone())
    } else {
        Model::with_cap(waa.clone(), cap)
    }
}

/// Decides acceptance from state `state` and returns a checked
/// certificate: a derivation file of `⊢ M ≥ {q}` with status `Ok`, or of
/// `⊢ M ≱ {q}` with status `Rejected`. `certificate` may be null.
///
/// # Safety
/// Handles must be live; `certificate` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn lamy_check_state(
    term: *const LamyTerm,
    a: *const LamyAutomaton,
    state: usize,
    cap: usize,
    certificate: *mut *mut c_char,
) -> LamyStatus {
    guard(|| {
        if term.is_null() || a.is_null() {
            return fail(LamyStatus::NullArgument, "null argument");
        }
        if !certificate.is_null() {
            *certificate = ptr::null_mut();
        }
        let (t, waa) = (&*term, &(*a).waa);
        if state >= waa.num_states() {
            return fail(LamyStatus::UnknownState, format!("no state with index {state}"));
        }
        if !t.term.ty().is_base() || !t.term.free_vars().is_empty() {
            return fail(LamyStatus::ParseError, "expected a closed term of type o");
        }
        let model = make_model(waa, cap);
        let dual = match dual_model(&model) {
            Ok(d) => d,
            Err(e) => return fail(derive_status(&e), e.to_string()),
        };
        let certs = match decide(&model, &dual, &t.term, StateSet::singleton(state)) {
            Ok(c) => c,
            Err(e) => return fail(derive_status(&e), e.to_string()),
        };
        let c = &certs[0];
        if let Err(v) = check_derivation(&c.derivation, &t.term, waa) {
            return fail(LamyStatus::Internal, format!("certificate rejected: {v}"));
        }
        give_string(
            certificate,
            render_derivation_file(&t.sig, &t.term, &c.derivation, waa),
        );
        if c.accepted {
            LamyStatus::Ok
        } else {
            LamyStatus::Rejected
        }
    })
}

/// Checks a derivation file against an automaton given as text. Returns
/// `Ok` for a valid derivation of a closed term, `Rejected` with the
/// violation in [`lamy_last_error`] otherwise.
///
/// # Safety
/// Both arguments must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn lamy_verify(derivation: *const c_char, automaton: *const c_char) -> LamyStatus {
    guard(|| {
        let (d, w) = match (text(derivation), text(automaton)) {
            (Ok(d), Ok(w)) => (d, w),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let sig = match derivation_signature(d) {
            Ok(s) => s,
            Err(e) => return fail(LamyStatus::ParseError, e.to_string()),
        };
        let waa = match parse_waa(w, &sig) {
            Ok(w) => w,
            Err(e) => return fail(LamyStatus::ParseError, e.to_string()),
        };
        let (t, der) = match parse_derivation_file(d, &waa) {
            Ok(x) => x,
            Err(e) => return fail(LamyStatus::ParseError, e.to_string()),
        };
        if let Err(v) = check_derivation(&der, &t, &waa) {
            return fail(LamyStatus::Rejected, v.to_string());
        }
        if !der.judgment.path.0.is_empty() || !der.judgment.env.is_empty() {
            return fail(LamyStatus::Rejected, "root judgment must be about the whole term");
        }
        LamyStatus::Ok
    })
}

/// Böhm-tree prefix of the term as text: a space-separated word for
/// chains, `a(b, c)` tree notation otherwise.
///
/// # Safety
/// `term` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lamy_bohm_prefix(
    term: *const LamyTerm,
    depth: usize,
    fuel: usize,
    out: *mut *mut c_char,
) -> LamyStatus {
    guard(|| {
        if term.is_null() || out.is_null() {
            return fail(LamyStatus::NullArgument, "null argument");
        }
        let t = &(*term).term;
        if !t.ty().is_base() || !t.free_vars().is_empty() {
            return fail(LamyStatus::ParseError, "expected a closed term of type o");
        }
        let p = bohm_prefix(t, depth, fuel);
        give_string(out, p.word().unwrap_or_else(|| p.to_string()));
        LamyStatus::Ok
    })
}
