//! C interface to `od-core`.
//!
//! Terms cross the boundary as opaque `OdTerm` handles owned by the caller
//! and released with `od_term_free`. Strings returned by the library are
//! released with `od_string_free`. Every call returns an `OdStatus`; on
//! failure `od_last_error` describes the problem until the next call on the
//! same thread.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use od_core::order::{compare, OrderError};
use od_core::subst::{make_subst, SubstError};
use od_core::term::{kset, normalize, parse, render, ParseError, SystemFlavor, Term, TermError};
use od_core::wf::validate;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Arity = 4,
    NotRegular = 5,
    IllFormed = 6,
    Domain = 7,
    FlavorMismatch = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdFlavor {
    M = 0,
    P3 = 1,
    P4 = 2,
}

impl From<OdFlavor> for SystemFlavor {
    fn from(f: OdFlavor) -> Self {
        match f {
            OdFlavor::M => SystemFlavor::M,
            OdFlavor::P3 => SystemFlavor::P3,
            OdFlavor::P4 => SystemFlavor::P4,
        }
    }
}

/// Opaque term handle.
pub struct OdTerm {
    term: Term,
    flavor: SystemFlavor,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Fail(OdStatus, String);

impl From<ParseError> for Fail {
    fn from(e: ParseError) -> Self {
        let status = match e {
            ParseError::Arity { .. } => OdStatus::Arity,
            ParseError::NonRegularAdm { .. } => OdStatus::NotRegular,
            ParseError::Syntax { .. } => OdStatus::Parse,
        };
        Fail(status, e.to_string())
    }
}

impl From<OrderError> for Fail {
    fn from(e: OrderError) -> Self {
        Fail(OdStatus::IllFormed, e.to_string())
    }
}

impl From<TermError> for Fail {
    fn from(e: TermError) -> Self {
        Fail(OdStatus::NotRegular, e.to_string())
    }
}

impl From<SubstError> for Fail {
    fn from(e: SubstError) -> Self {
        let status = match e {
            SubstError::IllFormed(_) => OdStatus::IllFormed,
            _ => OdStatus::Domain,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> OdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            OdStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OdStatus::Panic
        }
    }
}

unsafe fn term_ref<'a>(t: *const OdTerm) -> Result<&'a OdTerm, Fail> {
    t.as_ref()
        .ok_or_else(|| Fail(OdStatus::NullPointer, "null term handle".into()))
}

fn out_ptr<T>(out: *mut T) -> Result<(), Fail> {
    if out.is_null() {
        Err(Fail(OdStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn same_flavor(a: &OdTerm, b: &OdTerm) -> Result<SystemFlavor, Fail> {
    if a.flavor != b.flavor {
        return Err(Fail(
            OdStatus::FlavorMismatch,
            format!("terms of flavors {} and {}", a.flavor, b.flavor),
        ));
    }
    Ok(a.flavor)
}

fn boxed(term: Term, flavor: SystemFlavor) -> *mut OdTerm {
    Box::into_raw(Box::new(OdTerm { term, flavor }))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).unwrap_or_default().into_raw()
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn od_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `text` as a term of `flavor` and stores a new handle in `*out`.
/// Parsed terms are syntactically valid but may break a stage proviso; see
/// `od_term_violations`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn od_term_parse(
    text: *const c_char,
    flavor: OdFlavor,
    out: *mut *mut OdTerm,
) -> OdStatus {
    guard(|| {
        out_ptr(out)?;
        if text.is_null() {
            return Err(Fail(OdStatus::NullPointer, "null text".into()));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Fail(OdStatus::InvalidUtf8, e.to_string()))?;
        let flavor = SystemFlavor::from(flavor);
        let term = parse(s, flavor)?;
        *out = boxed(term, flavor);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `t` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn od_term_free(t: *mut OdTerm) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn od_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Canonical text of `t` in `*out`.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn od_term_render(t: *const OdTerm, out: *mut *mut c_char) -> OdStatus {
    guard(|| {
        out_ptr(out)?;
        *out = c_string(render(&term_ref(t)?.term));
        Ok(())
    })
}

/// Normal form of `t` as a new handle.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn od_term_normalize(t: *const OdTerm, out: *mut *mut OdTerm) -> OdStatus {
    guard(|| {
        out_ptr(out)?;
        let t = term_ref(t)?;
        *out = boxed(normalize(&t.term), t.flavor);
        Ok(())
    })
}

/// Stores -1, 0 or 1 in `*out` as `a` is below, equal to or above `b`.
///
/// # Safety
/// `a`, `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn od_term_compare(
    a: *const OdTerm,
    b: *const OdTerm,
    out: *mut c_int,
) -> OdStatus {
    guard(|| {
        out_ptr(out)?;
        let (a, b) = (term_ref(a)?, term_ref(b)?);
        let flavor = same_flavor(a, b)?;
        *out = match compare(&a.term, &b.term, flavor)? {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        };
        Ok(())
    })
}

/// Number of well-formedness violations of `t`; zero means well formed.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn od_term_violations(t: *const OdTerm, out: *mut usize) -> OdStatus {
    guard(|| {
        out_ptr(out)?;
        let t = term_ref(t)?;
        *out = validate(&t.term, t.flavor).len();
        Ok(())
    })
}

/// The K-set of `alpha` with respect to the regular term `sigma`, one
/// rendered member per line, in `*out`.
///
/// # Safety
/// `sigma`, `alpha` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn od_kset(
    sigma: *const OdTerm,
    alpha: *const OdTerm,
    out: *mut *mut c_char,
) -> OdStatus {
    guard(|| {
        out_ptr(out)?;
        let (s, a) = (term_ref(sigma)?, term_ref(alpha)?);
        same_flavor(s, a)?;
        let ks = kset(&normalize(&s.term), &normalize(&a.term))?;
        let lines: Vec<String> = ks.iter().map(render).collect();
        *out = c_string(lines.join("\n"));
        Ok(())
    })
}

/// Applies the substitution `pi := target` to `xi`; the image is a new
/// handle in `*out`.
///
/// # Safety
/// `target`, `xi` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn od_subst_apply(
    target: *const OdTerm,
    xi: *const OdTerm,
    out: *mut *mut OdTerm,
) -> OdStatus {
    guard(|| {
        out_ptr(out)?;
        let (t, x) = (term_ref(target)?, term_ref(xi)?);
        let flavor = same_flavor(t, x)?;
        let sub = make_subst(&Term::Pi, &t.term, flavor)?;
        *out = boxed(sub.apply(&x.term)?, flavor);
        Ok(())
    })
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn od_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
