//! C interface to the autstruct model checker.
//!
//! Every fallible call returns an `int32_t` status (`AUTSTRUCT_OK` or a
//! negative code) and writes results through out-pointers. The message of
//! the last failure on the calling thread is available from
//! `autstruct_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use autstruct::automata::ops::DEFAULT_SUBSET_BUDGET;
use autstruct::checker::{decide_classic, decide_local, ClassicOptions, LocalOptions};
use autstruct::fragments::{decide_sigma1, decide_sigma2, FragmentOptions};
use autstruct::logic::parse_formula;
use autstruct::presentation::{max_degree, validate, Presentation, PresentationJson};
use autstruct::reductions::builtin;
use autstruct::Error;

pub const AUTSTRUCT_OK: i32 = 0;
pub const AUTSTRUCT_ERR_NULL: i32 = -1;
pub const AUTSTRUCT_ERR_UTF8: i32 = -2;
/// Malformed JSON or formula text.
pub const AUTSTRUCT_ERR_PARSE: i32 = -3;
/// The input is well formed but not acceptable (bad automaton, unknown
/// relation, wrong fragment, unbounded degree, ...).
pub const AUTSTRUCT_ERR_INVALID: i32 = -4;
pub const AUTSTRUCT_ERR_RESOURCE: i32 = -5;
pub const AUTSTRUCT_ERR_IO: i32 = -6;
pub const AUTSTRUCT_ERR_PANIC: i32 = -7;

pub const AUTSTRUCT_ENGINE_CLASSIC: i32 = 0;
pub const AUTSTRUCT_ENGINE_LOCAL: i32 = 1;
pub const AUTSTRUCT_ENGINE_SIGMA1: i32 = 2;
pub const AUTSTRUCT_ENGINE_SIGMA2: i32 = 3;

/// An immutable presentation.
pub struct AutstructPresentation(Presentation);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. } | Error::Json(_) => AUTSTRUCT_ERR_PARSE,
        Error::Resource(_) => AUTSTRUCT_ERR_RESOURCE,
        Error::Io(_) => AUTSTRUCT_ERR_IO,
        _ => AUTSTRUCT_ERR_INVALID,
    }
}

struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

/// Runs `f`, recording failures and caught panics.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AUTSTRUCT_OK,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            AUTSTRUCT_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(AUTSTRUCT_ERR_NULL, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(AUTSTRUCT_ERR_UTF8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const AutstructPresentation) -> Result<&'a Presentation, Fail> {
    p.as_ref().map(|p| &p.0).ok_or_else(|| Fail(AUTSTRUCT_ERR_NULL, "presentation is null".into()))
}

fn out_ptr<T>(out: *mut T) -> Result<(), Fail> {
    if out.is_null() {
        Err(Fail(AUTSTRUCT_ERR_NULL, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

fn budget_or_default(budget: u64) -> usize {
    if budget == 0 {
        DEFAULT_SUBSET_BUDGET
    } else {
        usize::try_from(budget).unwrap_or(usize::MAX)
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn autstruct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn autstruct_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a presentation document. Free the handle with
/// `autstruct_presentation_free`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn autstruct_presentation_from_json(
    json: *const c_char,
    out: *mut *mut AutstructPresentation,
) -> i32 {
    guard(|| {
        out_ptr(out)?;
        let text = str_arg(json, "json")?;
        let doc: PresentationJson = serde_json::from_str(text).map_err(Error::from)?;
        let p = Presentation::from_json(&doc)?;
        *out = Box::into_raw(Box::new(AutstructPresentation(p)));
        Ok(())
    })
}

/// Looks up a builtin presentation such as `"nat-succ"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn autstruct_presentation_builtin(
    name: *const c_char,
    out: *mut *mut AutstructPresentation,
) -> i32 {
    guard(|| {
        out_ptr(out)?;
        let p = builtin(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(AutstructPresentation(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn autstruct_presentation_free(p: *mut AutstructPresentation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Serializes a presentation. Free the string with `autstruct_string_free`.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn autstruct_presentation_to_json(
    p: *const AutstructPresentation,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        out_ptr(out)?;
        let text = serde_json::to_string(&handle(p)?.to_json()).map_err(Error::from)?;
        *out = CString::new(text).expect("json has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn autstruct_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the mandatory structural checks; `*passed` is 1 or 0. A `budget`
/// of 0 selects the default.
///
/// # Safety
/// `p` must be a live handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn autstruct_validate(p: *const AutstructPresentation, budget: u64, passed: *mut i32) -> i32 {
    guard(|| {
        out_ptr(passed)?;
        let report = validate(handle(p)?, budget_or_default(budget))?;
        if let Some(f) = report.failed().next() {
            set_error(format!("check {} failed", f.check.id()));
        }
        *passed = report.passed as i32;
        Ok(())
    })
}

/// Maximum Gaifman degree; `*degree` is -1 when it exceeds `cap`.
///
/// # Safety
/// `p` must be a live handle and `degree` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn autstruct_max_degree(
    p: *const AutstructPresentation,
    cap: u64,
    budget: u64,
    degree: *mut i64,
) -> i32 {
    guard(|| {
        out_ptr(degree)?;
        if cap == 0 {
            return Err(Fail(AUTSTRUCT_ERR_INVALID, "cap must be positive".into()));
        }
        let cap = usize::try_from(cap).unwrap_or(usize::MAX);
        let d = max_degree(handle(p)?, cap, budget_or_default(budget))?;
        *degree = d.bound().map_or(-1, |n| n as i64);
        Ok(())
    })
}

/// Decides a sentence with one of the `AUTSTRUCT_ENGINE_*` engines;
/// `*verdict` is 1 for true and 0 for false.
///
/// # Safety
/// `p` must be a live handle, `formula` a NUL-terminated string and
/// `verdict` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn autstruct_decide(
    p: *const AutstructPresentation,
    formula: *const c_char,
    engine: i32,
    budget: u64,
    verdict: *mut i32,
) -> i32 {
    guard(|| {
        out_ptr(verdict)?;
        let p = handle(p)?;
        let f = parse_formula(str_arg(formula, "formula")?)?;
        let budget = budget_or_default(budget);
        let v = match engine {
            AUTSTRUCT_ENGINE_CLASSIC => decide_classic(p, &f, ClassicOptions { budget, ..Default::default() })?.0,
            AUTSTRUCT_ENGINE_LOCAL => decide_local(p, &f, LocalOptions { budget, ..Default::default() })?.0,
            AUTSTRUCT_ENGINE_SIGMA1 => decide_sigma1(p, &f, FragmentOptions { budget, ..Default::default() })?.0,
            AUTSTRUCT_ENGINE_SIGMA2 => decide_sigma2(p, &f, FragmentOptions { budget, ..Default::default() })?.0,
            other => return Err(Fail(AUTSTRUCT_ERR_INVALID, format!("unknown engine {other}"))),
        };
        *verdict = v as i32;
        Ok(())
    })
}
